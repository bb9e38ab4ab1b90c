use std::f64::consts::PI;
use std::time::Instant;

use bandlattice::field::SampledField;
use bandlattice::hamiltonian::{
    build_bandlimited_kg, build_harmonic_chain, harmonic_chain_omega2, klein_gordon_omega2,
    DispersionCurve,
};
use bandlattice::io::{
    fmt_f64, write_dispersion, write_field, write_json_file, write_kernel, write_rows,
    write_snapshot, write_trajectory, HamiltonianSpec,
};
use bandlattice::operators::{
    basel_partial_sum, derivative_kernel, lattice_derivative, partial_sum_s,
    second_derivative_kernel, KernelMode,
};
use bandlattice::random::{
    random_phase_space_state, random_quadratic_hamiltonian, random_test_function, seeded,
};
use bandlattice::sampling::{reconstruct, resample, sample, TestFunction};
use bandlattice::symmetry::{
    classical_flow, quadratic_commutator, translate_field, translation_rate, ConservationReport,
    FlowConfig, FockOracle, Trajectory,
};
use bandlattice::{
    BanddedKernel, Boundary, Complex64, Lattice, Model, QuadraticLatticeHamiltonian, TotalMomentum,
};

use crate::config::{Command, RunConfig};
use crate::report::Report;
use crate::CliError;

pub fn run<'a>(config: &'a RunConfig) -> Result<Report<'a>, CliError> {
    std::fs::create_dir_all(&config.out).map_err(|e| {
        CliError::Config(format!(
            "cannot create output directory {}: {e}",
            config.out.display()
        ))
    })?;
    let mut report = Report::new(config);
    match config.command {
        Command::Reconstruct => reconstruct_cmd(config, &mut report)?,
        Command::Dispersion => dispersion_cmd(config, &mut report)?,
        Command::Conserve => conserve_cmd(config, &mut report)?,
        Command::Translate => translate_cmd(config, &mut report)?,
        Command::KernelSweep => kernel_sweep_cmd(config, &mut report)?,
    }
    report.write(&config.out)?;
    Ok(report)
}

fn lattice(config: &RunConfig) -> Result<Lattice, CliError> {
    Ok(Lattice::new(
        config.dx,
        config.b,
        config.n,
        config.boundary,
    )?)
}

/// Evaluation points: eight per lattice step over the circle, or over the
/// trusted interior of a truncated lattice.
fn dense_grid(lat: &Lattice) -> Vec<f64> {
    let per_step = 8;
    let (start, steps) = match lat.boundary() {
        Boundary::Periodic => (0, lat.size()),
        Boundary::Truncated => (lat.edge_margin(), lat.size() - 1 - 2 * lat.edge_margin()),
    };
    (0..=steps * per_step)
        .map(|i| lat.point(start as isize) + i as f64 * lat.spacing() / per_step as f64)
        .collect()
}

fn complex_row(x: f64, v: Complex64) -> Vec<String> {
    vec![fmt_f64(x), fmt_f64(v.re), fmt_f64(v.im)]
}

fn scaled(f: TestFunction, amplitude: f64) -> TestFunction {
    match f {
        TestFunction::FourierSum(c) => {
            TestFunction::FourierSum(c.into_iter().map(|(k, a)| (k, a * amplitude)).collect())
        }
        other => other,
    }
}

fn reconstruct_cmd(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let lat = lattice(config)?;
    let f = scaled(
        random_test_function(&lat, 0.9, config.terms, &mut seeded(config.seed)),
        config.amplitude,
    );
    let sampling = lat.refined(config.oversample)?;
    let samples = sample(&f, &sampling)?;
    write_field(&config.out.join("samples.csv"), &samples)?;

    let grid = dense_grid(&lat);
    let values: Vec<Complex64> = grid.iter().map(|&x| reconstruct(&samples, x)).collect();
    let exact: Vec<Complex64> = grid.iter().map(|&x| f.eval(&lat, x)).collect();
    let errors: Vec<f64> = values
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).norm())
        .collect();
    write_rows(
        &config.out.join("reconstruction.csv"),
        &["x", "value_re", "value_im"],
        grid.iter().zip(&values).map(|(&x, &v)| complex_row(x, v)),
    )?;
    write_rows(
        &config.out.join("error.csv"),
        &["x", "exact_re", "exact_im", "abs_err"],
        grid.iter().zip(&exact).zip(&errors).map(|((&x, &v), &e)| {
            let mut row = complex_row(x, v);
            row.push(fmt_f64(e));
            row
        }),
    )?;
    let worst = errors.iter().copied().fold(0.0, f64::max);
    match lat.boundary() {
        Boundary::Periodic => report.below("max_reconstruction_error", worst, 1e-9),
        Boundary::Truncated => report.info("max_interior_reconstruction_error", worst),
    }
    Ok(())
}

fn dispersion_check(
    report: &mut Report,
    name: &str,
    curve: &DispersionCurve,
    expected: impl Fn(f64) -> f64,
) {
    report.below(
        &format!("{name}_max_abs_error"),
        curve.max_abs_error(expected),
        1e-9,
    );
}

/// Continuum reference curve for a model, if there is one.
fn expected_omega2(h: &QuadraticLatticeHamiltonian) -> Option<Box<dyn Fn(f64) -> f64>> {
    let dx = h.lattice().spacing();
    match *h.model() {
        Model::KleinGordon { mass } => Some(Box::new(move |k| klein_gordon_omega2(k, mass))),
        Model::HarmonicChain {
            particle_mass,
            spring,
        } => Some(Box::new(move |k| {
            harmonic_chain_omega2(k, dx, particle_mass, spring)
        })),
        _ => None,
    }
}

fn dispersion_cmd(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let lat = lattice(config)?;
    let kg = build_bandlimited_kg(config.mass, &lat)?;
    let chain = build_harmonic_chain(config.particle_mass, config.spring, &lat)?;
    let mut models = vec![("kg", kg), ("chain", chain)];
    if let Some(path) = &config.hamiltonian {
        models.push(("spec", HamiltonianSpec::from_path(path)?.build()?));
    }
    for (name, h) in &models {
        let curve = h.dispersion()?;
        match expected_omega2(h) {
            Some(expected) => {
                write_dispersion(
                    &config.out.join(format!("dispersion_{name}.csv")),
                    &curve,
                    &expected,
                )?;
                dispersion_check(report, name, &curve, &expected);
            }
            None => write_dispersion(
                &config.out.join(format!("dispersion_{name}.csv")),
                &curve,
                |_| f64::NAN,
            )?,
        }
        if *name == "kg" {
            let mut symbol: Vec<f64> = curve.points.iter().map(|p| p.omega2).collect();
            symbol.sort_by(f64::total_cmp);
            let eigen = h.to_phase_space_form().normal_mode_omega2();
            let gap = symbol
                .iter()
                .zip(&eigen)
                .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
                .fold(0.0, f64::max);
            report.below("kg_symbol_vs_eigen", gap, 1e-8);
        }
    }
    Ok(())
}

struct FlowRun {
    name: &'static str,
    trajectory: Trajectory,
}

fn write_flow(config: &RunConfig, lat: &Lattice, run: &FlowRun) -> Result<(), CliError> {
    write_trajectory(
        &config.out.join(format!("trajectory_{}.csv", run.name)),
        &run.trajectory,
    )?;
    let dir = config.out.join("snapshots");
    std::fs::create_dir_all(&dir).map_err(bandlattice::Error::from)?;
    for (i, snap) in run.trajectory.snapshots.iter().enumerate() {
        write_snapshot(&dir.join(format!("{}_{i:04}.csv", run.name)), lat, snap)?;
    }
    Ok(())
}

fn conserve_cmd(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let lat = lattice(config)?;
    let momentum = TotalMomentum::new(&lat)?;
    let kg = build_bandlimited_kg(config.mass, &lat)?;
    let chain = build_harmonic_chain(config.particle_mass, config.spring, &lat)?;
    let mut quadratic = vec![
        ("klein-gordon".to_string(), kg),
        ("harmonic-chain".to_string(), chain),
    ];
    if let Some(path) = &config.hamiltonian {
        quadratic.push((
            "spec".to_string(),
            HamiltonianSpec::from_path(path)?.build()?,
        ));
    }
    let mut rng = seeded(config.seed);
    let widest = ((config.n - 1) / 2).clamp(1, 16);
    for i in 0..config.ensemble {
        let h = random_quadratic_hamiltonian(&lat, 1 + i % widest, &mut rng);
        quadratic.push((format!("random-quadratic-{i:02}"), h));
    }

    let mut entries = Vec::new();
    let mut kernel_worst: f64 = 0.0;
    let mut scalar_worst: f64 = 0.0;
    for (name, h) in &quadratic {
        if h.lattice() != &lat {
            return Err(CliError::Config(format!(
                "Hamiltonian `{name}` lives on {:?}, not {lat:?}",
                h.lattice()
            )));
        }
        let c = quadratic_commutator(&h.to_phase_space_form(), momentum.form())?;
        kernel_worst = kernel_worst.max(c.max_abs());
        scalar_worst = scalar_worst.max(c.scalar.abs());
        entries.push(ConservationReport {
            hamiltonian: name.clone(),
            kernel_residual: c.max_abs(),
            fock_residual: None,
            flow_drift: None,
            energy_drift: None,
            scalar_residual: Some(c.scalar),
        });
    }
    report.below("quadratic_kernel_residual", kernel_worst, 1e-10);
    report.below("quadratic_scalar_residual", scalar_worst, 1e-10);

    // Fock-space oracle on a tiny periodic lattice.
    let started = Instant::now();
    let fock_lat = Lattice::new(config.dx, config.b, config.fock_sites, Boundary::Periodic)?;
    let fock_p = TotalMomentum::new(&fock_lat)?;
    let oracle = FockOracle::new(config.fock_sites, config.cutoff)?;
    let fock_kg = build_bandlimited_kg(config.mass, &fock_lat)?.to_phase_space_form();
    let fock_chain =
        build_harmonic_chain(config.particle_mass, config.spring, &fock_lat)?.to_phase_space_form();
    let fock = [
        oracle.commutator_residual(&fock_kg, 0.0, fock_p.form())?,
        oracle.commutator_residual(&fock_chain, 0.0, fock_p.form())?,
        oracle.commutator_residual(&fock_kg, config.lambda, fock_p.form())?,
    ];
    println!("fock oracle: {:.2} s", started.elapsed().as_secs_f64());
    report.below("quadratic_fock_residual", fock[0].max(fock[1]), 1e-8);

    // Flows from one shared initial state.
    let flow_lat = Lattice::new(config.dx, config.b, config.flow_n, Boundary::Periodic)?;
    let (q, p) =
        random_phase_space_state(&flow_lat, 0.5, &mut seeded(config.seed.wrapping_add(1)))?;
    let record_every = (config.steps / 1000).max(1);
    let flow = FlowConfig::new(config.t_final, config.steps)
        .record_every(record_every)
        .snapshot_every(config.snapshot_every);
    let flow_kg = build_bandlimited_kg(config.mass, &flow_lat)?;
    let flow_chain = build_harmonic_chain(config.particle_mass, config.spring, &flow_lat)?;
    let runs = [
        FlowRun {
            name: "klein_gordon",
            trajectory: classical_flow(&flow_kg, &q, &p, &flow)?,
        },
        FlowRun {
            name: "harmonic_chain",
            trajectory: classical_flow(&flow_chain, &q, &p, &flow)?,
        },
        FlowRun {
            name: "klein_gordon_cubic",
            trajectory: classical_flow(&flow_kg, &q, &p, &flow.with_cubic(config.lambda))?,
        },
    ];
    for run in &runs {
        write_flow(config, &flow_lat, run)?;
    }
    let linear_drift = runs[0]
        .trajectory
        .momentum_drift()
        .max(runs[1].trajectory.momentum_drift());
    report.below("quadratic_flow_momentum_drift", linear_drift, 1e-9);

    for (i, run) in runs.iter().enumerate() {
        let entry = match i {
            0 | 1 => &mut entries[i],
            _ => {
                let mut cubic = entries[0].clone();
                cubic.hamiltonian = "klein-gordon+cubic".into();
                entries.push(cubic);
                entries.last_mut().expect("just pushed")
            }
        };
        entry.fock_residual = Some(fock[i]);
        entry.flow_drift = Some(run.trajectory.momentum_drift());
        entry.energy_drift = Some(run.trajectory.energy_drift());
    }

    let cubic = &runs[2].trajectory;
    if config.lambda != 0.0 {
        report.above("cubic_fock_residual", fock[2], 1e-3);
        report.above("cubic_flow_momentum_drift", cubic.momentum_drift(), 1e-3);
        report.below("cubic_flow_energy_drift", cubic.energy_drift(), 1e-6);
    } else {
        report.below("cubic_flow_momentum_drift", cubic.momentum_drift(), 1e-9);
    }
    write_json_file(&config.out.join("conservation_report.json"), &entries)?;
    Ok(())
}

fn translate_cmd(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let lat = lattice(config)?;
    let mut rng = seeded(config.seed);
    let f = scaled(
        random_test_function(&lat, 0.9, config.terms, &mut rng),
        config.amplitude,
    );
    let samples = sample(&f, &lat)?.real_part();
    let shifted = translate_field(&samples, config.a);
    write_field(&config.out.join("original.csv"), &samples)?;
    write_field(&config.out.join("shifted_samples.csv"), &shifted)?;
    let grid = dense_grid(&lat);
    let curve = |path: &str, shift: f64| {
        write_rows(
            &config.out.join(path),
            &["x", "value"],
            grid.iter()
                .map(|&x| vec![fmt_f64(x), fmt_f64(reconstruct(&samples, x - shift))]),
        )
    };
    curve("reconstructed.csv", 0.0)?;
    curve("shifted_curve.csv", config.a)?;

    let round_trip = translate_field(&shifted, -config.a).max_abs_diff(&samples);
    if lat.boundary() == Boundary::Truncated {
        report.info("round_trip", round_trip);
        return Ok(());
    }
    report.below("round_trip", round_trip, 1e-8);
    let closed_form = sample(&f.shifted(config.a), &lat)?.real_part();
    report.below(
        "shift_vs_closed_form",
        shifted.max_abs_diff(&closed_form),
        1e-10,
    );
    report.at_most(
        "unit_shift_vs_roll",
        translate_field(&samples, lat.spacing()).max_abs_diff(&samples.roll(1)),
        0.0,
    );

    let generator = translation_rate(&samples, 1e-3)
        .try_add(&lattice_derivative(&lat)?.apply(&samples)?)?
        .max_abs();
    report.below("generator_vs_derivative", generator, 1e-8);

    let (q, p) = random_phase_space_state(&lat, 1.0, &mut rng)?;
    let before = TotalMomentum::new(&lat)?.value(&q, &p)?;
    let mut gap: f64 = 0.0;
    for b in [0.25, 0.5, 0.75].map(|t| t * lat.spacing()) {
        let (q2, p2): (SampledField, SampledField) = (resample(&q, b)?, resample(&p, b)?);
        gap = gap.max((TotalMomentum::new(q2.lattice())?.value(&q2, &p2)? - before).abs());
    }
    report.below("momentum_offset_invariance", gap, 1e-9);
    Ok(())
}

/// Powers of ten from 10 up to `max`, then `max` itself.
fn decades(max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(10u64), |v| v.checked_mul(10))
        .take_while(|&v| v <= max)
        .collect();
    if out.last() != Some(&max) {
        out.push(max);
    }
    out
}

fn kernel_sweep_cmd(config: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let dx = config.dx;
    let mut rows = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    for m in decades(config.m_max as u64) {
        let mode = KernelMode::Toeplitz {
            half_width: m as usize,
        };
        let d = derivative_kernel(dx, mode)?;
        let d2 = second_derivative_kernel(dx, mode)?;
        let dd = BanddedKernel::compose(&d, &d)?;
        let diag = (dd.coefficient(0).unwrap_or(f64::NAN) + PI * PI / (3.0 * dx * dx)).abs();
        let near = (-5..=5)
            .map(|i| {
                (dd.coefficient(i).unwrap_or(f64::NAN) - d2.coefficient(i).unwrap_or(f64::NAN))
                    .abs()
            })
            .fold(0.0, f64::max);
        let bound = 2.0 / (m as f64 * dx * dx);
        worst_ratio = worst_ratio.max(diag / bound);
        rows.push(vec![
            m.to_string(),
            fmt_f64(diag),
            fmt_f64(near),
            fmt_f64(bound),
        ]);
    }
    write_rows(
        &config.out.join("kernel_sweep.csv"),
        &[
            "M",
            "diagonal_residual",
            "near_diagonal_residual",
            "tail_bound",
        ],
        rows,
    )?;
    report.below(
        "toeplitz_diagonal_residual_over_tail_bound",
        worst_ratio,
        1.0,
    );

    let lengths = decades(config.l_max);
    let mut rows = Vec::new();
    let mut s_err: f64 = 0.0;
    for m in [1i64, 2, 3, 5] {
        for &l in &lengths {
            let s = partial_sum_s(m, l)?;
            let expected = 2.0 / (m * m) as f64;
            rows.push(vec![
                m.to_string(),
                l.to_string(),
                fmt_f64(s),
                fmt_f64(expected),
                fmt_f64((s - expected).abs()),
            ]);
            if l == config.l_max {
                s_err = s_err.max((s - expected).abs());
            }
        }
    }
    write_rows(
        &config.out.join("s_convergence.csv"),
        &["m", "L", "partial_sum", "expected", "abs_err"],
        rows,
    )?;
    let l = config.l_max as f64;
    report.below("cotangent_sum_error_at_l_max", s_err, 5.0 / l);

    let basel: Vec<(u64, f64)> = lengths.iter().map(|&l| (l, basel_partial_sum(l))).collect();
    write_rows(
        &config.out.join("basel.csv"),
        &["L", "partial_sum", "abs_err"],
        basel.iter().map(|&(l, s)| {
            vec![
                l.to_string(),
                fmt_f64(s),
                fmt_f64((s - PI * PI / 6.0).abs()),
            ]
        }),
    )?;
    let basel_err = (basel.last().map(|b| b.1).unwrap_or(f64::NAN) - PI * PI / 6.0).abs();
    report.below("basel_error_at_l_max", basel_err, 2.0 / l);

    let mode = KernelMode::Periodic { size: config.n };
    let d = derivative_kernel(dx, mode)?;
    let d2 = second_derivative_kernel(dx, mode)?;
    let dd = BanddedKernel::compose(&d, &d)?;
    let symbol_err = match (dd.symbol(), d2.symbol()) {
        (Some(a), Some(b)) => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max),
        _ => f64::INFINITY,
    };
    report.below("periodic_symbol_residual", symbol_err, 1e-12);
    write_kernel(&config.out.join("kernel_d_periodic.csv"), &d)?;
    write_kernel(&config.out.join("kernel_d2_periodic.csv"), &d2)?;
    write_kernel(
        &config.out.join("kernel_d_toeplitz.csv"),
        &derivative_kernel(dx, KernelMode::Toeplitz { half_width: 16 })?,
    )?;
    Ok(())
}

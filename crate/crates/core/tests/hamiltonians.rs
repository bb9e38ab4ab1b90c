use std::f64::consts::PI;

use bandlattice::field::SampledField;
use bandlattice::hamiltonian::{
    build_bandlimited_kg, build_harmonic_chain, harmonic_chain_omega2, klein_gordon_omega2,
    Couplings,
};
use bandlattice::io::{write_dispersion, HamiltonianSpec};
use bandlattice::random::{random_bandlimited_field, random_quadratic_hamiltonian, seeded};
use bandlattice::sampling::{sample, TestFunction};
use bandlattice::{Boundary, Error, Lattice, QuadraticLatticeHamiltonian};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

#[test]
fn kg_coupling_values() {
    let lat = Lattice::truncated(1.0, 50).unwrap();
    let h = build_bandlimited_kg(0.0, &lat).unwrap();
    assert!((h.qq().get(0) - PI * PI / 6.0).abs() < 1e-15);
    assert_eq!(h.qq().get(1), -1.0);
    assert_eq!(h.qq().get(2), 0.25);
    assert_eq!(h.pp().get(0), 0.5);
    assert!(h.qp().is_zero());
    for n in 1..30i64 {
        assert!((h.qq().get(n).abs() - 1.0 / (n * n) as f64).abs() < 1e-15);
        assert_eq!(h.qq().get(n).signum(), if n % 2 == 0 { 1.0 } else { -1.0 });
    }
    assert!(matches!(
        build_bandlimited_kg(-1.0, &lat),
        Err(Error::InvalidParameter(_))
    ));
    assert!(build_bandlimited_kg(1.0, &Lattice::periodic(1.0, 8).unwrap()).is_err());
}

#[test]
fn massless_periodic_kg_has_zero_mode() {
    let lat = Lattice::periodic(1.0, 257).unwrap();
    let h = build_bandlimited_kg(0.0, &lat).unwrap();
    let total: f64 = h.qq().values().iter().sum();
    assert!(total.abs() < 1e-9);
    let q = SampledField::from_fn(lat, |_| 1.0);
    assert!(h.energy(&q, &SampledField::zeros(lat)).unwrap().abs() < 1e-9);
}

#[test]
fn harmonic_chain_examples() {
    let lat = Lattice::periodic(1.0, 3).unwrap();
    let h = build_harmonic_chain(1.0, 1.0, &lat).unwrap();
    let form = h.to_phase_space_form();
    let expected_q =
        DMatrix::from_row_slice(3, 3, &[1.0, -0.5, -0.5, -0.5, 1.0, -0.5, -0.5, -0.5, 1.0]);
    assert!((form.qq_block() - expected_q).amax() < 1e-15);
    assert!((form.pp_block() - DMatrix::identity(3, 3) * 0.5).amax() < 1e-15);

    let lat = Lattice::periodic(1.0, 11).unwrap();
    let h = build_harmonic_chain(1.0, 2.5, &lat).unwrap();
    let zero = SampledField::zeros(lat);
    assert_eq!(
        h.energy(&SampledField::from_fn(lat, |_| 3.0), &zero)
            .unwrap(),
        0.0
    );
    assert_eq!(
        h.energy(&SampledField::kronecker(lat, 4, 1.0), &zero)
            .unwrap(),
        2.5
    );

    // The expanded coupling reproduces the spring sum.
    let mut rng = seeded(3);
    let q = SampledField::from_fn(lat, |_| rng.gen_range(-1.0..1.0));
    let springs: f64 = (0..11)
        .map(|j| 1.25 * (q.at(j + 1) - q.at(j)).powi(2))
        .sum();
    assert!((h.energy(&q, &zero).unwrap() - springs).abs() < 1e-13);

    assert!(build_harmonic_chain(0.0, 1.0, &lat).is_err());
    assert!(build_harmonic_chain(1.0, -1.0, &lat).is_err());
}

#[test]
fn energy_matches_form_contraction() {
    let mut rng = seeded(11);
    for boundary in [Boundary::Periodic, Boundary::Truncated] {
        let lat = Lattice::new(0.7, 0.1, 21, boundary).unwrap();
        let hams = [
            build_bandlimited_kg(1.1, &lat).unwrap(),
            build_harmonic_chain(1.3, 0.8, &lat).unwrap(),
            random_quadratic_hamiltonian(&lat, 6, &mut rng),
        ];
        for h in &hams {
            let form = h.to_phase_space_form();
            for _ in 0..100 {
                let q = SampledField::from_fn(lat, |_| rng.gen_range(-1.0..1.0));
                let p = SampledField::from_fn(lat, |_| rng.gen_range(-1.0..1.0));
                let direct = h.energy(&q, &p).unwrap();
                let contracted = form.evaluate(q.values(), p.values()).unwrap();
                assert!(
                    (direct - contracted).abs() < 1e-10,
                    "{direct} vs {contracted}"
                );
            }
        }
    }
}

#[test]
fn kg_plane_wave_energy() {
    let lat = Lattice::periodic(1.0, 33).unwrap();
    let h = build_bandlimited_kg(0.0, &lat).unwrap();
    let k = lat.momentum(5);
    let q = sample(&TestFunction::plane_wave(k), &lat)
        .unwrap()
        .real_part();
    // (1/2Δx)·Σ (−q D₂ q)·Δx² … reduces to (NΔx/2)·k²·½ for a unit cosine.
    let expected = 33.0 / 2.0 * k * k * 0.5;
    assert!((h.energy(&q, &SampledField::zeros(lat)).unwrap() - expected).abs() < 1e-10);
}

#[test]
fn chain_lift_matches_discrete_energy() {
    let lat = Lattice::new(1.0, 0.3, 33, Boundary::Periodic).unwrap();
    let h = build_harmonic_chain(1.7, 0.9, &lat).unwrap();
    let mut rng = seeded(21);
    for _ in 0..20 {
        let q = random_bandlimited_field(&lat, 0.95, 6, &mut rng).unwrap();
        let p = random_bandlimited_field(&lat, 0.95, 6, &mut rng).unwrap();
        let discrete = h.energy(&q, &p).unwrap();
        let lifted = h.lift_energy_continuum(&q, &p, 4 * 33).unwrap();
        assert!(
            ((discrete - lifted) / discrete).abs() < 1e-6,
            "{discrete} vs {lifted}"
        );
        let refined = h.lift_energy_continuum(&q, &p, 8 * 33).unwrap();
        assert!((refined - lifted).abs() < 1e-9);
    }
    let zero = SampledField::zeros(lat);
    assert_eq!(h.lift_energy_continuum(&zero, &zero, 200).unwrap(), 0.0);
    assert!(h.lift_energy_continuum(&zero, &zero, 100).is_err());
    let kg = build_bandlimited_kg(1.0, &lat).unwrap();
    assert!(kg.lift_energy_continuum(&zero, &zero, 200).is_err());
}

#[test]
fn kg_dispersion_examples() {
    let lat = Lattice::periodic(1.0, 257).unwrap();
    let curve = build_bandlimited_kg(0.0, &lat)
        .unwrap()
        .dispersion()
        .unwrap();
    assert!(curve.max_abs_error(|k| k * k) < 1e-9);
    let zero = curve.points.iter().find(|p| p.n == 0).unwrap();
    assert!(zero.omega2.abs() < 1e-9);
    let massive = build_bandlimited_kg(2.0, &lat)
        .unwrap()
        .dispersion()
        .unwrap();
    let k0 = massive.points.iter().find(|p| p.n == 0).unwrap();
    assert!((k0.omega2 - 4.0).abs() < 1e-9);
    assert!(
        build_bandlimited_kg(0.0, &Lattice::truncated(1.0, 9).unwrap())
            .unwrap()
            .dispersion()
            .is_err()
    );
}

#[test]
fn chain_dispersion_matches_circulant_diagonalization() {
    let lat = Lattice::periodic(1.0, 31).unwrap();
    let h = build_harmonic_chain(1.0, 1.0, &lat).unwrap();
    let curve = h.dispersion().unwrap();
    assert!(curve.max_abs_error(|k| harmonic_chain_omega2(k, 1.0, 1.0, 1.0)) < 1e-12);

    // Independent route: eigenvalues of the q-block scaled by the p-block.
    let form = h.to_phase_space_form();
    let inverse_mass = 2.0 * form.pp_block()[(0, 0)];
    let stiffness = form.qq_block() * 2.0;
    let mut eig: Vec<f64> = SymmetricEigen::new(stiffness)
        .eigenvalues
        .iter()
        .map(|v| v * inverse_mass)
        .collect();
    eig.sort_by(f64::total_cmp);
    let mut symbol: Vec<f64> = curve.points.iter().map(|p| p.omega2).collect();
    symbol.sort_by(f64::total_cmp);
    for (a, b) in eig.iter().zip(&symbol) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn dispersion_two_ways_agree() {
    for (dx, mass) in [(1.0, 1.0), (0.5, 0.3)] {
        let lat = Lattice::periodic(dx, 41).unwrap();
        let h = build_bandlimited_kg(mass, &lat).unwrap();
        let mut symbol: Vec<f64> = h
            .dispersion()
            .unwrap()
            .points
            .iter()
            .map(|p| p.omega2)
            .collect();
        symbol.sort_by(f64::total_cmp);
        let eig = h.to_phase_space_form().normal_mode_omega2();
        assert_eq!(eig.len(), symbol.len());
        for (a, b) in eig.iter().zip(&symbol) {
            assert!((a - b).abs() < 1e-8 * b.max(1.0), "{a} vs {b}");
        }
    }
}

#[test]
fn chain_approaches_massless_kg_quadratically() {
    // M = Δx and k_s = 1/Δx give ω² = (4/Δx²)·sin²(kΔx/2) → k².
    let length = 10.0;
    let k = 2.0 * PI / length;
    let mut prev: Option<f64> = None;
    for n in [11usize, 21, 41, 81, 161] {
        let dx = length / n as f64;
        let lat = Lattice::periodic(dx, n).unwrap();
        let h = build_harmonic_chain(dx, 1.0 / dx, &lat).unwrap();
        let w2 = h
            .dispersion()
            .unwrap()
            .points
            .iter()
            .find(|p| p.n == 1)
            .unwrap()
            .omega2;
        let diff = (w2 - klein_gordon_omega2(k, 0.0)).abs();
        let scaled = diff / (dx * dx * k.powi(4) / 12.0);
        assert!((scaled - 1.0).abs() < 0.05, "N = {n}: {scaled}");
        if let Some(p) = prev {
            assert!(p / diff > 3.0);
        }
        prev = Some(diff);
    }
}

#[test]
fn indefinite_forms_are_rejected() {
    let lat = Lattice::periodic(1.0, 9).unwrap();
    let h = QuadraticLatticeHamiltonian::new(
        lat,
        Couplings::from_values(vec![-1.0]).unwrap(),
        Couplings::zeros(0),
        Couplings::from_values(vec![0.5]).unwrap(),
    )
    .unwrap();
    assert!(matches!(h.dispersion(), Err(Error::Indefinite { .. })));
    assert!(random_quadratic_hamiltonian(&lat, 2, &mut seeded(1))
        .dispersion()
        .is_err());
}

#[test]
fn spec_files_and_dispersion_dump() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("h.json");
    std::fs::write(
        &spec,
        r#"{"type": "harmonic_chain", "params": {"particle_mass": 2.0, "spring": 0.5}, "dx": 1.0, "n": 9, "boundary": "periodic"}"#,
    )
    .unwrap();
    let h = HamiltonianSpec::from_path(&spec).unwrap().build().unwrap();
    assert_eq!(h.pp().get(0), 0.25);
    assert_eq!(h.qq().get(1), -0.25);
    let out = dir.path().join("d.csv");
    write_dispersion(&out, &h.dispersion().unwrap(), |k| {
        harmonic_chain_omega2(k, 1.0, 2.0, 0.5)
    })
    .unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("n,k,omega2_measured,omega2_expected,abs_err\n"));
    assert_eq!(text.lines().count(), 10);
}

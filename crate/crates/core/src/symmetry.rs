//! Continuous translation symmetry of lattice fields.
//!
//! The lattice total momentum `P = −pᵀ·D·q` generates continuous translations
//! of the Shannon-lifted field. It commutes with every translation-invariant
//! quadratic Hamiltonian and fails to commute once cubic terms appear. Three
//! independent witnesses are provided: the phase-space commutator kernel, a
//! truncated Fock-space brute force, and classical time evolution.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Amplitude, SampledField};
use crate::hamiltonian::{stack, PhaseSpaceForm, QuadraticLatticeHamiltonian};
use crate::lattice::{Boundary, Lattice};
use crate::operators::{lattice_derivative, BanddedKernel};
use crate::sampling::interpolate;
use crate::spectral::{signed_mode, Circulant};
use crate::sum::KahanSum;

/// Canonical structure `[ξ_a, ξ_b] = i·Ωₛ_{ab}` over `(q, p)`:
/// `Ωₛ = [[0, I], [−I, 0]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticForm {
    size: usize,
}

impl SymplecticForm {
    pub fn new(size: usize) -> Self {
        Self { size }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.size;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            m[(j, n + j)] = 1.0;
            m[(n + j, j)] = -1.0;
        }
        m
    }
}

/// Bandlimited total momentum `P = −Σ_{ij} D_{ij}·p_i·q_j`.
#[derive(Clone, Debug)]
pub struct TotalMomentum {
    lattice: Lattice,
    derivative: BanddedKernel,
    form: PhaseSpaceForm,
}

impl TotalMomentum {
    /// Periodic lattices need odd `N`; truncated lattices use the full-width
    /// Toeplitz derivative.
    pub fn new(lattice: &Lattice) -> Result<Self> {
        if lattice.boundary() == Boundary::Periodic && lattice.size().is_multiple_of(2) {
            return Err(Error::EvenPeriodicSize(lattice.size()));
        }
        let derivative = lattice_derivative(lattice)?;
        let d = derivative.to_dense(lattice)?;
        let n = lattice.size();
        let mut b = DMatrix::zeros(2 * n, 2 * n);
        // qp-block −½Dᵀ, pq-block −½D.
        b.view_mut((0, n), (n, n))
            .copy_from(&(d.transpose() * -0.5));
        b.view_mut((n, 0), (n, n)).copy_from(&(&d * -0.5));
        let form = PhaseSpaceForm::new(lattice.spacing(), b)?;
        Ok(Self {
            lattice: *lattice,
            derivative,
            form,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn form(&self) -> &PhaseSpaceForm {
        &self.form
    }

    pub fn derivative(&self) -> &BanddedKernel {
        &self.derivative
    }

    /// Classical value `−Σ_i p_i·(Dq)_i`, computed through the derivative
    /// kernel rather than the stored form.
    pub fn value(&self, q: &SampledField, p: &SampledField) -> Result<f64> {
        let q = q.relabel(self.lattice)?;
        let dq = self.derivative.apply(&q)?;
        let mut acc = KahanSum::new(0.0);
        for (&pi, &dqi) in p.values().iter().zip(dq.values()) {
            acc.add(-pi * dqi);
        }
        Ok(acc.total())
    }
}

/// Convenience for [`TotalMomentum::new`].
pub fn build_total_momentum(lattice: &Lattice) -> Result<TotalMomentum> {
    TotalMomentum::new(lattice)
}

/// Quadratic kernel and scalar part of `i·[Â, B̂]` for `Â = ξᵀAξ`,
/// `B̂ = ξᵀBξ`.
#[derive(Clone, Debug)]
pub struct Commutator {
    pub kernel: PhaseSpaceForm,
    /// Coefficient of `i·1` left over when the kernel is put in symmetric
    /// operator ordering.
    pub scalar: f64,
}

impl Commutator {
    pub fn max_abs(&self) -> f64 {
        self.kernel.max_abs()
    }
}

/// `i·[ξᵀAξ, ξᵀBξ] = ξᵀCξ` with `C = −2(AΩₛB − BΩₛA)`.
pub fn quadratic_commutator(a: &PhaseSpaceForm, b: &PhaseSpaceForm) -> Result<Commutator> {
    if a.size() != b.size() {
        return Err(Error::DimensionMismatch(a.size(), b.size()));
    }
    let omega = SymplecticForm::new(a.size()).matrix();
    let am = a.matrix();
    let bm = b.matrix();
    let c = (am * &omega * bm - bm * &omega * am) * -2.0;
    let scalar = 0.5 * c.component_mul(&omega).sum();
    Ok(Commutator {
        kernel: PhaseSpaceForm::new(a.spacing(), c)?,
        scalar,
    })
}

/// Brute-force commutator check in a truncated Fock space.
///
/// Each site carries `cutoff + 1` oscillator levels with
/// `q = (a + a†)/√2`, `p = i(a† − a)/√2`. The commutator is measured only
/// between states whose occupations stay `pad` levels below the cutoff,
/// where the truncated matrix elements are exact.
#[derive(Clone, Copy, Debug)]
pub struct FockOracle {
    sites: usize,
    cutoff: usize,
    pad: usize,
}

const MAX_FOCK_DIMENSION: usize = 100_000;

impl FockOracle {
    pub fn new(sites: usize, cutoff: usize) -> Result<Self> {
        if sites == 0 || cutoff < 2 {
            return Err(Error::InvalidParameter(
                "need at least one site and cutoff ≥ 2".into(),
            ));
        }
        if sites > 4 || cutoff > 6 {
            return Err(Error::ResourceGuard(format!(
                "Fock oracle is limited to 4 sites and cutoff 6, got {sites} sites, cutoff {cutoff}"
            )));
        }
        let dim = (cutoff + 1).checked_pow(sites as u32).unwrap_or(usize::MAX);
        if dim > MAX_FOCK_DIMENSION {
            return Err(Error::ResourceGuard(format!(
                "Fock dimension {dim} exceeds {MAX_FOCK_DIMENSION}"
            )));
        }
        Ok(Self {
            sites,
            cutoff,
            pad: 2,
        })
    }

    pub fn with_pad(mut self, pad: usize) -> Self {
        self.pad = pad;
        self
    }

    pub fn dimension(&self) -> usize {
        (self.cutoff + 1).pow(self.sites as u32)
    }

    fn occupation(&self, state: usize, site: usize) -> usize {
        (state / (self.cutoff + 1).pow(site as u32)) % (self.cutoff + 1)
    }

    /// Single-site lowering operator embedded in the full space.
    fn lowering(&self, site: usize) -> DMatrix<Complex64> {
        let d = self.dimension();
        let stride = (self.cutoff + 1).pow(site as u32);
        let mut a = DMatrix::zeros(d, d);
        for state in 0..d {
            let n = self.occupation(state, site);
            if n > 0 {
                a[(state - stride, state)] = Complex64::new((n as f64).sqrt(), 0.0);
            }
        }
        a
    }

    /// `(q_1..q_N, p_1..p_N)` as operator matrices.
    fn quadratures(&self) -> Vec<DMatrix<Complex64>> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut qs = Vec::with_capacity(self.sites);
        let mut ps = Vec::with_capacity(self.sites);
        for j in 0..self.sites {
            let a = self.lowering(j);
            let ad = a.adjoint();
            qs.push((&a + &ad) * Complex64::new(r, 0.0));
            ps.push((&ad - &a) * Complex64::new(0.0, r));
        }
        qs.extend(ps);
        qs
    }

    fn assemble(&self, form: &PhaseSpaceForm, xi: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
        let d = self.dimension();
        let m = form.matrix();
        let mut out = DMatrix::zeros(d, d);
        for (a, xa) in xi.iter().enumerate() {
            let mut inner = DMatrix::<Complex64>::zeros(d, d);
            for (b, xb) in xi.iter().enumerate() {
                let c = m[(a, b)];
                if c != 0.0 {
                    inner += xb * Complex64::new(c, 0.0);
                }
            }
            out += xa * inner;
        }
        out
    }

    /// `‖[Ĥ, P̂]‖_F / (‖Ĥ‖_F·‖P̂‖_F)` with every norm taken on the padded
    /// sub-block, for `Ĥ = ξᵀAξ + λ·Σ_j q_j³`.
    pub fn commutator_residual(
        &self,
        hamiltonian: &PhaseSpaceForm,
        cubic: f64,
        momentum: &PhaseSpaceForm,
    ) -> Result<f64> {
        for size in [hamiltonian.size(), momentum.size()] {
            if size != self.sites {
                return Err(Error::DimensionMismatch(size, self.sites));
            }
        }
        let xi = self.quadratures();
        let mut h = self.assemble(hamiltonian, &xi);
        if cubic != 0.0 {
            for q in &xi[..self.sites] {
                h += q * q * q * Complex64::new(cubic, 0.0);
            }
        }
        let p = self.assemble(momentum, &xi);
        let comm = &h * &p - &p * &h;
        let keep: Vec<usize> = (0..self.dimension())
            .filter(|&s| (0..self.sites).all(|j| self.occupation(s, j) + self.pad <= self.cutoff))
            .collect();
        let sub_norm = |m: &DMatrix<Complex64>| {
            let mut acc = KahanSum::new(0.0);
            for &r in &keep {
                for &c in &keep {
                    acc.add(m[(r, c)].norm_sqr());
                }
            }
            acc.total().sqrt()
        };
        Ok(sub_norm(&comm) / (sub_norm(&h) * sub_norm(&p)))
    }
}

/// Convenience wrapper around [`FockOracle`] with the default pad of two.
pub fn fock_oracle_commutator(
    hamiltonian: &QuadraticLatticeHamiltonian,
    cubic: f64,
    momentum: &TotalMomentum,
    cutoff: usize,
) -> Result<f64> {
    let oracle = FockOracle::new(hamiltonian.lattice().size(), cutoff)?;
    oracle.commutator_residual(&hamiltonian.to_phase_space_form(), cubic, momentum.form())
}

/// Samples of the field translated by `a`: `out[k] = φ(x_k − a)` with `φ`
/// the Shannon lift of `field`.
pub fn translate_field<T: Amplitude>(field: &SampledField<T>, a: f64) -> SampledField<T> {
    let lattice = field.lattice();
    let a = match lattice.boundary() {
        Boundary::Periodic => a % lattice.circumference(),
        Boundary::Truncated => a,
    };
    let shift = a / lattice.spacing();
    SampledField::from_fn(*lattice, |k| interpolate(field, k as f64 - shift))
}

/// `d/da translate_field(field, a)` at `a = 0` by the fourth-order central
/// difference with step `h`.
pub fn translation_rate(field: &SampledField, h: f64) -> SampledField {
    let at = |a: f64| translate_field(field, a);
    let (p1, m1, p2, m2) = (at(h), at(-h), at(2.0 * h), at(-2.0 * h));
    SampledField::from_fn(*field.lattice(), |j| {
        (8.0 * (p1.values()[j] - m1.values()[j]) - (p2.values()[j] - m2.values()[j])) / (12.0 * h)
    })
}

/// Classical Poisson-bracket witness `{Σ_j q_j³, P} = −3·Σ_j q_j²·(Dq)_j`.
pub fn cubic_witness(q: &SampledField) -> Result<f64> {
    let d = lattice_derivative(q.lattice())?;
    let dq = d.apply(q)?;
    let mut acc = KahanSum::new(0.0);
    for (&qi, &dqi) in q.values().iter().zip(dq.values()) {
        acc.add(qi * qi * dqi);
    }
    Ok(-3.0 * acc.total())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowConfig {
    pub t_final: f64,
    pub steps: usize,
    /// Coefficient `λ` of the cubic term `λ·Σ_j q_j³`.
    pub cubic: f64,
    /// Record a sample every this many steps (the final step is always kept).
    pub record_every: usize,
    /// Keep a full `(q, p)` snapshot every this many recorded samples.
    pub snapshot_every: Option<usize>,
}

impl FlowConfig {
    pub fn new(t_final: f64, steps: usize) -> Self {
        Self {
            t_final,
            steps,
            cubic: 0.0,
            record_every: 1,
            snapshot_every: None,
        }
    }

    pub fn with_cubic(mut self, cubic: f64) -> Self {
        self.cubic = cubic;
        self
    }

    pub fn record_every(mut self, every: usize) -> Self {
        self.record_every = every.max(1);
        self
    }

    pub fn snapshot_every(mut self, every: usize) -> Self {
        self.snapshot_every = Some(every.max(1));
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub t: f64,
    pub energy: f64,
    pub momentum: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<FlowSample>,
    pub snapshots: Vec<Snapshot>,
    pub final_q: Vec<f64>,
    pub final_p: Vec<f64>,
}

impl Trajectory {
    /// `max_t |P(t) − P(0)|`.
    pub fn momentum_drift(&self) -> f64 {
        let p0 = self.samples[0].momentum;
        self.samples
            .iter()
            .map(|s| (s.momentum - p0).abs())
            .fold(0.0, f64::max)
    }

    /// `max_t |E(t) − E(0)|`.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.samples[0].energy;
        self.samples
            .iter()
            .map(|s| (s.energy - e0).abs())
            .fold(0.0, f64::max)
    }
}

/// Time evolution under `H + λ·Σ_j q_j³` on a periodic lattice.
///
/// Without the cubic term the flow is the exact linear map
/// `exp(t·2ΩₛA)`; with it, kick-drift-kick leapfrog (which needs
/// `c_qp ≡ 0`).
pub fn classical_flow(
    hamiltonian: &QuadraticLatticeHamiltonian,
    q0: &SampledField,
    p0: &SampledField,
    config: &FlowConfig,
) -> Result<Trajectory> {
    let lattice = *hamiltonian.lattice();
    if lattice.boundary() != Boundary::Periodic {
        return Err(Error::InvalidParameter(
            "classical flow needs a periodic lattice".into(),
        ));
    }
    if config.steps == 0 || !(config.t_final.is_finite() && config.t_final > 0.0) {
        return Err(Error::InvalidParameter(
            "need positive steps and t_final".into(),
        ));
    }
    let momentum = TotalMomentum::new(&lattice)?;
    let q0 = q0.relabel(lattice)?;
    let p0 = p0.relabel(lattice)?;
    if config.cubic == 0.0 {
        linear_flow(hamiltonian, &momentum, q0, p0, config)
    } else {
        leapfrog_flow(hamiltonian, &momentum, q0, p0, config)
    }
}

struct Recorder<'a> {
    config: &'a FlowConfig,
    lattice: Lattice,
    momentum: &'a TotalMomentum,
    samples: Vec<FlowSample>,
    snapshots: Vec<Snapshot>,
}

impl Recorder<'_> {
    fn record(&mut self, step: usize, q: &[f64], p: &[f64], energy: f64) -> Result<()> {
        if !step.is_multiple_of(self.config.record_every) && step != self.config.steps {
            return Ok(());
        }
        let t = self.config.t_final * step as f64 / self.config.steps as f64;
        let qf = SampledField::new(self.lattice, q.to_vec())?;
        let pf = SampledField::new(self.lattice, p.to_vec())?;
        let momentum = self.momentum.value(&qf, &pf)?;
        if let Some(every) = self.config.snapshot_every {
            if self.samples.len().is_multiple_of(every) {
                self.snapshots.push(Snapshot {
                    t,
                    q: q.to_vec(),
                    p: p.to_vec(),
                });
            }
        }
        self.samples.push(FlowSample {
            t,
            energy,
            momentum,
        });
        Ok(())
    }
}

fn linear_flow(
    hamiltonian: &QuadraticLatticeHamiltonian,
    momentum: &TotalMomentum,
    q0: SampledField,
    p0: SampledField,
    config: &FlowConfig,
) -> Result<Trajectory> {
    let lattice = *hamiltonian.lattice();
    let n = lattice.size();
    let dt = config.t_final / config.steps as f64;
    let propagator = (hamiltonian.to_phase_space_form().dynamics_matrix() * dt).exp();
    let mut xi: DVector<f64> = stack(q0.values(), p0.values());
    let mut rec = Recorder {
        config,
        lattice,
        momentum,
        samples: Vec::new(),
        snapshots: Vec::new(),
    };
    let energy_of = |xi: &DVector<f64>| -> Result<f64> {
        let q = SampledField::new(lattice, xi.rows(0, n).iter().copied().collect())?;
        let p = SampledField::new(lattice, xi.rows(n, n).iter().copied().collect())?;
        hamiltonian.energy(&q, &p)
    };
    for step in 0..=config.steps {
        if step > 0 {
            xi = &propagator * &xi;
        }
        if step % config.record_every == 0 || step == config.steps {
            let e = energy_of(&xi)?;
            rec.record(step, xi.rows(0, n).as_slice(), xi.rows(n, n).as_slice(), e)?;
        }
    }
    Ok(Trajectory {
        samples: rec.samples,
        snapshots: rec.snapshots,
        final_q: xi.rows(0, n).iter().copied().collect(),
        final_p: xi.rows(n, n).iter().copied().collect(),
    })
}

/// Circulant form of a coupling block, symmetrized: eigenvalue
/// `Σ_m c[m]·cos(k_n·m·Δx)` on mode `n`.
fn coupling_circulant(
    couplings: &crate::hamiltonian::Couplings,
    lattice: &Lattice,
) -> (Circulant, f64) {
    let n = lattice.size();
    let mut max_symbol: f64 = 0.0;
    let symbol = (0..n)
        .map(|i| {
            let k = lattice.momentum(signed_mode(i, n));
            let s = couplings.symbol(k, lattice.spacing());
            max_symbol = max_symbol.max(s.abs());
            Complex64::new(s, 0.0)
        })
        .collect();
    (Circulant::new(symbol), max_symbol)
}

fn leapfrog_flow(
    hamiltonian: &QuadraticLatticeHamiltonian,
    momentum: &TotalMomentum,
    q0: SampledField,
    p0: SampledField,
    config: &FlowConfig,
) -> Result<Trajectory> {
    if !hamiltonian.qp().is_zero() {
        return Err(Error::InvalidParameter(
            "leapfrog needs a separable Hamiltonian (c_qp ≡ 0)".into(),
        ));
    }
    let lattice = *hamiltonian.lattice();
    let n = lattice.size();
    let lambda = config.cubic;
    let dt = config.t_final / config.steps as f64;
    let (qq, max_qq) = coupling_circulant(hamiltonian.qq(), &lattice);
    let (pp, max_pp) = coupling_circulant(hamiltonian.pp(), &lattice);
    let omega_max = (4.0 * max_qq * max_pp).sqrt();
    if omega_max * dt >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "time step {dt} too large for the fastest mode (ω_max = {omega_max})"
        )));
    }
    if lambda.abs() * q0.max_abs() * dt >= 0.1 {
        return Err(Error::InvalidParameter(format!(
            "time step {dt} too large for cubic coupling {lambda} at amplitude {}",
            q0.max_abs()
        )));
    }

    let mut q = q0.into_values();
    let mut p = p0.into_values();
    let mut qq_q = vec![0.0; n];
    let mut pp_p = vec![0.0; n];
    let energy = |q: &[f64], p: &[f64], qq_q: &mut [f64], pp_p: &mut [f64]| {
        qq.apply_real(q, qq_q);
        pp.apply_real(p, pp_p);
        let mut acc = KahanSum::new(0.0);
        for j in 0..n {
            acc.add(q[j] * qq_q[j] + p[j] * pp_p[j] + lambda * q[j] * q[j] * q[j]);
        }
        acc.total()
    };
    let mut rec = Recorder {
        config,
        lattice,
        momentum,
        samples: Vec::new(),
        snapshots: Vec::new(),
    };
    let e0 = energy(&q, &p, &mut qq_q, &mut pp_p);
    rec.record(0, &q, &p, e0)?;

    // Force −∂H/∂q = −(2Qq + 3λq²); velocity ∂H/∂p = 2Cp.
    let kick = |q: &[f64], p: &mut [f64], buf: &mut [f64], h: f64| {
        qq.apply_real(q, buf);
        for j in 0..n {
            p[j] -= h * (2.0 * buf[j] + 3.0 * lambda * q[j] * q[j]);
        }
    };
    kick(&q, &mut p, &mut qq_q, 0.5 * dt);
    for step in 1..=config.steps {
        pp.apply_real(&p, &mut pp_p);
        for j in 0..n {
            q[j] += dt * 2.0 * pp_p[j];
        }
        if step < config.steps {
            kick(&q, &mut p, &mut qq_q, dt);
        } else {
            kick(&q, &mut p, &mut qq_q, 0.5 * dt);
        }
        if step % config.record_every == 0 || step == config.steps {
            // Synchronize p to the current time for the recorded sample.
            let mut p_sync = p.clone();
            if step < config.steps {
                kick(&q, &mut p_sync, &mut qq_q, -0.5 * dt);
            }
            if q.iter().chain(&p_sync).any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "leapfrog diverged at step {step}"
                )));
            }
            let e = energy(&q, &p_sync, &mut qq_q, &mut pp_p);
            rec.record(step, &q, &p_sync, e)?;
        }
    }
    Ok(Trajectory {
        samples: rec.samples,
        snapshots: rec.snapshots,
        final_q: q,
        final_p: p,
    })
}

/// Summary of every conservation witness for one Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub hamiltonian: String,
    pub kernel_residual: f64,
    pub fock_residual: Option<f64>,
    pub flow_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scalar_residual: Option<f64>,
}

//! Translation-invariant quadratic lattice Hamiltonians.
//!
//! Coefficient convention:
//!
//! ```text
//! H = Σ_j Σ_m ( c_qq[m]·q_j·q_{j+m} + c_qp[m]·q_j·p_{j+m} + c_pp[m]·p_j·p_{j+m} )
//! ```
//!
//! with `j + m` wrapped on periodic lattices and dropped past the ends of
//! truncated ones. Any global prefactor (such as the `1/(2Δx)` of the
//! Klein–Gordon Hamiltonian) is folded into the coefficients.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::lattice::{Boundary, Lattice};
use crate::operators::{second_derivative_coefficient, wrapped_second_derivative_coefficient};
use crate::sampling::interpolate;
use crate::sum::KahanSum;

/// Which physical model a Hamiltonian was built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Model {
    KleinGordon { mass: f64 },
    HarmonicChain { particle_mass: f64, spring: f64 },
    Custom,
}

/// Coupling sequence `c[m]` for `|m| ≤ half_width`.
#[derive(Clone, Debug, PartialEq)]
pub struct Couplings {
    half_width: usize,
    values: Vec<f64>,
}

impl Couplings {
    pub fn zeros(half_width: usize) -> Self {
        Self {
            half_width,
            values: vec![0.0; 2 * half_width + 1],
        }
    }

    pub fn from_fn(half_width: usize, f: impl Fn(i64) -> f64) -> Self {
        let w = half_width as i64;
        Self {
            half_width,
            values: (-w..=w).map(f).collect(),
        }
    }

    /// Coefficients listed from `m = −W` to `m = W`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(
                "coupling count must be odd (m = −W..=W)".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("couplings must be finite".into()));
        }
        Ok(Self {
            half_width: values.len() / 2,
            values,
        })
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn get(&self, m: i64) -> f64 {
        if m.unsigned_abs() as usize > self.half_width {
            0.0
        } else {
            self.values[(m + self.half_width as i64) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let w = self.half_width as i64;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - w, c))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn abs_sum(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    /// `Σ_m c[m]·cos(k·m·Δx)`: the eigenvalue of the symmetrized coupling on
    /// the plane wave of momentum `k`.
    pub fn symbol(&self, k: f64, spacing: f64) -> f64 {
        let mut acc = KahanSum::new(0.0);
        for (m, c) in self.iter() {
            if c != 0.0 {
                acc.add(c * (k * m as f64 * spacing).cos());
            }
        }
        acc.total()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticLatticeHamiltonian {
    lattice: Lattice,
    qq: Couplings,
    qp: Couplings,
    pp: Couplings,
    model: Model,
    tail_bound: f64,
    label: Option<String>,
}

impl QuadraticLatticeHamiltonian {
    pub fn new(lattice: Lattice, qq: Couplings, qp: Couplings, pp: Couplings) -> Result<Self> {
        Ok(Self {
            lattice,
            qq,
            qp,
            pp,
            model: Model::Custom,
            tail_bound: 0.0,
            label: None,
        })
    }

    /// Bandlimited Klein–Gordon field of mass `mass` on `lattice`.
    ///
    /// On periodic lattices (odd `N`) the couplings are the circulant
    /// wrapping of the infinite-lattice ones, so the Hamiltonian is exact on
    /// the circle; on truncated lattices the infinite-lattice couplings are
    /// kept up to `|n| = N − 1`.
    pub fn bandlimited_klein_gordon(mass: f64, lattice: &Lattice) -> Result<Self> {
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mass must be non-negative, got {mass}"
            )));
        }
        let dx = lattice.spacing();
        let n = lattice.size();
        let mass_term = dx * mass * mass / 2.0;
        let (qq, tail_bound) = match lattice.boundary() {
            Boundary::Periodic => {
                if n.is_multiple_of(2) {
                    return Err(Error::EvenPeriodicSize(n));
                }
                let qq = Couplings::from_fn((n - 1) / 2, |m| {
                    -0.5 * dx * wrapped_second_derivative_coefficient(m, n, dx)
                        + if m == 0 { mass_term } else { 0.0 }
                });
                (qq, 0.0)
            }
            Boundary::Truncated => {
                let w = n.saturating_sub(1);
                let qq = Couplings::from_fn(w, |m| {
                    -0.5 * dx * second_derivative_coefficient(m, dx)
                        + if m == 0 { mass_term } else { 0.0 }
                });
                // Σ_{|n|>W} 1/(Δx n²) ≤ 2/(Δx W).
                (qq, 2.0 / (dx * w.max(1) as f64))
            }
        };
        Ok(Self {
            lattice: *lattice,
            qp: Couplings::zeros(0),
            pp: Couplings::from_fn(0, |_| 1.0 / (2.0 * dx)),
            qq,
            model: Model::KleinGordon { mass },
            tail_bound,
            label: Some("klein-gordon".into()),
        })
    }

    /// Nearest-neighbour harmonic chain `Σ_j [p_j²/(2M) + (k_s/2)(q_{j+1} − q_j)²]`.
    pub fn harmonic_chain(particle_mass: f64, spring: f64, lattice: &Lattice) -> Result<Self> {
        if !(particle_mass.is_finite() && particle_mass > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "particle mass must be positive, got {particle_mass}"
            )));
        }
        if !(spring.is_finite() && spring > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "spring constant must be positive, got {spring}"
            )));
        }
        let qq = Couplings::from_fn(1, |m| if m == 0 { spring } else { -spring / 2.0 });
        Ok(Self {
            lattice: *lattice,
            qq,
            qp: Couplings::zeros(0),
            pp: Couplings::from_fn(0, |_| 1.0 / (2.0 * particle_mass)),
            model: Model::HarmonicChain {
                particle_mass,
                spring,
            },
            tail_bound: 0.0,
            label: Some("harmonic-chain".into()),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn qq(&self) -> &Couplings {
        &self.qq
    }

    pub fn qp(&self) -> &Couplings {
        &self.qp
    }

    pub fn pp(&self) -> &Couplings {
        &self.pp
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Bound on the coupling mass dropped by truncating an infinite-lattice
    /// sequence.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    fn check_fields(&self, q: &SampledField, p: &SampledField) -> Result<()> {
        for f in [q, p] {
            let l = f.lattice();
            if l.spacing() != self.lattice.spacing()
                || l.size() != self.lattice.size()
                || l.boundary() != self.lattice.boundary()
            {
                return Err(Error::LatticeMismatch(format!(
                    "field on {l:?} for Hamiltonian on {:?}",
                    self.lattice
                )));
            }
        }
        Ok(())
    }

    /// Classical value of the quadratic form.
    pub fn energy(&self, q: &SampledField, p: &SampledField) -> Result<f64> {
        self.check_fields(q, p)?;
        let mut acc = KahanSum::new(0.0);
        for j in 0..self.lattice.size() as isize {
            let (qj, pj) = (q.at(j), p.at(j));
            for (m, c) in self.qq.iter() {
                acc.add(c * qj * q.at(j + m as isize));
            }
            for (m, c) in self.qp.iter() {
                acc.add(c * qj * p.at(j + m as isize));
            }
            for (m, c) in self.pp.iter() {
                acc.add(c * pj * p.at(j + m as isize));
            }
        }
        Ok(acc.total())
    }

    /// Symmetric `2N×2N` matrix `A` over `(q_1..q_N, p_1..p_N)` with
    /// `energy(q, p) = ξᵀ·A·ξ`.
    pub fn to_phase_space_form(&self) -> PhaseSpaceForm {
        let n = self.lattice.size();
        let mut a = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n as isize {
            for (block, (row_off, col_off)) in
                [(&self.qq, (0, 0)), (&self.qp, (0, n)), (&self.pp, (n, n))]
            {
                for (m, c) in block.iter() {
                    if c == 0.0 {
                        continue;
                    }
                    if let Some(k) = self.lattice.wrap_index(j + m as isize) {
                        let r = row_off + j as usize;
                        let s = col_off + k;
                        a[(r, s)] += c / 2.0;
                        a[(s, r)] += c / 2.0;
                    }
                }
            }
        }
        PhaseSpaceForm {
            spacing: self.lattice.spacing(),
            size: n,
            matrix: a,
        }
    }

    /// Normal-mode dispersion from the coupling symbols: `ω² = (2σ_pp)(2σ_qq)`
    /// at every periodic lattice momentum.
    pub fn dispersion(&self) -> Result<DispersionCurve> {
        if self.lattice.boundary() != Boundary::Periodic {
            return Err(Error::InvalidParameter(
                "dispersion needs a periodic lattice".into(),
            ));
        }
        if !self.qp.is_zero() {
            return Err(Error::InvalidParameter("dispersion needs c_qp ≡ 0".into()));
        }
        let dx = self.lattice.spacing();
        let scale = 4.0 * self.pp.abs_sum() * self.qq.abs_sum();
        let (lo, _) = crate::lattice::mode_range(self.lattice.size());
        let mut points = Vec::new();
        for (i, k) in self.lattice.lattice_momenta().into_iter().enumerate() {
            let spp = self.pp.symbol(k, dx);
            let sqq = self.qq.symbol(k, dx);
            let omega2 = 4.0 * spp * sqq;
            let tol = 1e-12 * scale.max(1.0);
            if spp <= 0.0 || omega2 < -tol {
                return Err(Error::Indefinite { k, omega2 });
            }
            points.push(DispersionPoint {
                n: lo + i as i64,
                k,
                omega2,
            });
        }
        Ok(DispersionCurve { points })
    }

    /// Energy of a harmonic chain evaluated as the continuum integral of its
    /// Shannon-lifted fields,
    ///
    /// `½ ∮ [Δx·π(x)²/M + (k_s/Δx)(φ(x + Δx) − φ(x))²] dx`,
    ///
    /// by a uniform rule with `quadrature_points` nodes on the circle.
    pub fn lift_energy_continuum(
        &self,
        q: &SampledField,
        p: &SampledField,
        quadrature_points: usize,
    ) -> Result<f64> {
        let Model::HarmonicChain {
            particle_mass,
            spring,
        } = self.model
        else {
            return Err(Error::InvalidParameter(
                "continuum lift is defined for the harmonic chain".into(),
            ));
        };
        if self.lattice.boundary() != Boundary::Periodic {
            return Err(Error::InvalidParameter(
                "continuum lift needs a periodic lattice".into(),
            ));
        }
        self.check_fields(q, p)?;
        let n = self.lattice.size();
        if quadrature_points < 4 * n {
            return Err(Error::InvalidParameter(format!(
                "need at least {} quadrature points (4N), got {quadrature_points}",
                4 * n
            )));
        }
        let dx = self.lattice.spacing();
        let step = n as f64 / quadrature_points as f64; // in lattice units
        let q = q.relabel(self.lattice.with_offset(0.0)?)?;
        let p = p.relabel(self.lattice.with_offset(0.0)?)?;
        let mut acc = KahanSum::new(0.0);
        for i in 0..quadrature_points {
            let s = i as f64 * step;
            let phi = interpolate(&q, s);
            let phi_next = interpolate(&q, s + 1.0);
            let pi = interpolate(&p, s) / dx;
            let diff = phi_next - phi;
            acc.add(dx * pi * pi / particle_mass + spring / dx * diff * diff);
        }
        Ok(0.5 * acc.total() * step * dx)
    }
}

/// Convenience for [`QuadraticLatticeHamiltonian::bandlimited_klein_gordon`].
pub fn build_bandlimited_kg(mass: f64, lattice: &Lattice) -> Result<QuadraticLatticeHamiltonian> {
    QuadraticLatticeHamiltonian::bandlimited_klein_gordon(mass, lattice)
}

/// Convenience for [`QuadraticLatticeHamiltonian::harmonic_chain`].
pub fn build_harmonic_chain(
    particle_mass: f64,
    spring: f64,
    lattice: &Lattice,
) -> Result<QuadraticLatticeHamiltonian> {
    QuadraticLatticeHamiltonian::harmonic_chain(particle_mass, spring, lattice)
}

/// Symmetric bilinear kernel over stacked `(q_1..q_N, p_1..p_N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceForm {
    spacing: f64,
    size: usize,
    matrix: DMatrix<f64>,
}

impl PhaseSpaceForm {
    /// Wrap a `2N×2N` matrix, replacing it by its symmetric part.
    pub fn new(spacing: f64, matrix: DMatrix<f64>) -> Result<Self> {
        let (r, c) = matrix.shape();
        if r != c || r % 2 != 0 {
            return Err(Error::DimensionMismatch(r, c));
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        Ok(Self {
            spacing,
            size: r / 2,
            matrix: sym,
        })
    }

    pub fn zeros(spacing: f64, size: usize) -> Self {
        Self {
            spacing,
            size,
            matrix: DMatrix::zeros(2 * size, 2 * size),
        }
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Number of sites `N`; the matrix is `2N×2N`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn qq_block(&self) -> DMatrix<f64> {
        self.matrix
            .view((0, 0), (self.size, self.size))
            .into_owned()
    }

    pub fn qp_block(&self) -> DMatrix<f64> {
        self.matrix
            .view((0, self.size), (self.size, self.size))
            .into_owned()
    }

    pub fn pp_block(&self) -> DMatrix<f64> {
        self.matrix
            .view((self.size, self.size), (self.size, self.size))
            .into_owned()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.amax()
    }

    /// `ξᵀ·A·ξ` for `ξ = (q, p)`.
    pub fn evaluate(&self, q: &[f64], p: &[f64]) -> Result<f64> {
        if q.len() != self.size || p.len() != self.size {
            return Err(Error::DimensionMismatch(q.len().max(p.len()), self.size));
        }
        let xi = stack(q, p);
        let ax = &self.matrix * &xi;
        let mut acc = KahanSum::new(0.0);
        for (a, b) in xi.iter().zip(ax.iter()) {
            acc.add(a * b);
        }
        Ok(acc.total())
    }

    /// Hamiltonian vector field generator `2·Ωₛ·A`: `ξ̇ = 2ΩₛAξ`.
    pub fn dynamics_matrix(&self) -> DMatrix<f64> {
        let n = self.size;
        let a = &self.matrix;
        // Ωₛ = [[0, I], [−I, 0]]: rows of the p-block move up, the q-block down negated.
        let mut out = DMatrix::zeros(2 * n, 2 * n);
        out.view_mut((0, 0), (n, 2 * n))
            .copy_from(&(a.rows(n, n) * 2.0));
        out.view_mut((n, 0), (n, 2 * n))
            .copy_from(&(a.rows(0, n) * -2.0));
        out
    }

    /// Squared normal-mode frequencies from the eigenvalues `±iω` of the
    /// dynamics matrix, ascending, one per mode.
    pub fn normal_mode_omega2(&self) -> Vec<f64> {
        let eig = self.dynamics_matrix().complex_eigenvalues();
        let mut w2: Vec<f64> = eig.iter().map(|l| l.im * l.im - l.re * l.re).collect();
        w2.sort_by(f64::total_cmp);
        w2.into_iter().step_by(2).collect()
    }
}

pub(crate) fn stack(q: &[f64], p: &[f64]) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_iterator(q.len() + p.len(), q.iter().chain(p).copied())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionPoint {
    pub n: i64,
    pub k: f64,
    pub omega2: f64,
}

/// `(k_n, ω²_n)` over the lattice momenta.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionCurve {
    pub points: Vec<DispersionPoint>,
}

impl DispersionCurve {
    /// `max_n |ω²_n − expected(k_n)|`.
    pub fn max_abs_error(&self, expected: impl Fn(f64) -> f64) -> f64 {
        self.points
            .iter()
            .map(|p| (p.omega2 - expected(p.k)).abs())
            .fold(0.0, f64::max)
    }
}

/// Continuum Klein–Gordon dispersion `k² + m²`.
pub fn klein_gordon_omega2(k: f64, mass: f64) -> f64 {
    k * k + mass * mass
}

/// Harmonic-chain dispersion `4(k_s/M)·sin²(kΔx/2)`.
pub fn harmonic_chain_omega2(k: f64, spacing: f64, particle_mass: f64, spring: f64) -> f64 {
    let s = (k * spacing / 2.0).sin();
    4.0 * spring / particle_mass * s * s
}

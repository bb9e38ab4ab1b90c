use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::sinc_pi;

/// How the finite sample set stands in for the infinite lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Sites `0..N` on the line; samples outside are zero.
    Truncated,
    /// Sites on a circle of circumference `N·Δx`; indices wrap.
    Periodic,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "truncated" => Ok(Boundary::Truncated),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(Error::InvalidLattice(format!(
                "unknown boundary mode `{other}`"
            ))),
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Truncated => f.write_str("truncated"),
            Boundary::Periodic => f.write_str("periodic"),
        }
    }
}

/// Uniform one-dimensional sample grid `x_j = j·Δx + b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    spacing: f64,
    offset: f64,
    size: usize,
    boundary: Boundary,
}

impl Lattice {
    pub fn new(spacing: f64, offset: f64, size: usize, boundary: Boundary) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidLattice(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        if !(offset.is_finite() && (0.0..spacing).contains(&offset)) {
            return Err(Error::InvalidOffset { offset, spacing });
        }
        if size == 0 {
            return Err(Error::InvalidLattice("size must be positive".into()));
        }
        Ok(Self {
            spacing,
            offset,
            size,
            boundary,
        })
    }

    pub fn periodic(spacing: f64, size: usize) -> Result<Self> {
        Self::new(spacing, 0.0, size, Boundary::Periodic)
    }

    pub fn truncated(spacing: f64, size: usize) -> Result<Self> {
        Self::new(spacing, 0.0, size, Boundary::Truncated)
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    /// Same grid moved to a new offset `b′ ∈ [0, Δx)`.
    pub fn with_offset(&self, offset: f64) -> Result<Self> {
        Self::new(self.spacing, offset, self.size, self.boundary)
    }

    /// Same spacing and offset, new site count.
    pub fn with_size(&self, size: usize) -> Result<Self> {
        Self::new(self.spacing, self.offset, size, self.boundary)
    }

    /// A lattice `factor` times denser covering the same points (and the same
    /// circle when periodic).
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidLattice(
                "refinement factor must be positive".into(),
            ));
        }
        let spacing = self.spacing / factor as f64;
        Self::new(
            spacing,
            self.offset % spacing,
            self.size * factor,
            self.boundary,
        )
    }

    /// Bandlimit `Ω = π/Δx`.
    pub fn bandlimit(&self) -> f64 {
        PI / self.spacing
    }

    /// Length of the periodic domain, `N·Δx`.
    pub fn circumference(&self) -> f64 {
        self.size as f64 * self.spacing
    }

    pub fn point(&self, j: isize) -> f64 {
        j as f64 * self.spacing + self.offset
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.size as isize).map(|j| self.point(j)).collect()
    }

    /// Sites within this many of either end are edge-contaminated in
    /// truncated mode.
    pub fn edge_margin(&self) -> usize {
        self.size / 8
    }

    /// Whether `x` lies in the region where truncated reconstruction is
    /// trusted. Always true for periodic lattices.
    pub fn is_trusted(&self, x: f64) -> bool {
        match self.boundary {
            Boundary::Periodic => true,
            Boundary::Truncated => {
                let u = (x - self.offset) / self.spacing;
                let margin = self.edge_margin() as f64;
                u >= margin && u <= (self.size - 1) as f64 - margin
            }
        }
    }

    /// Reduce a site index into `0..N` (periodic) or return `None` when it
    /// falls off a truncated lattice.
    pub fn wrap_index(&self, j: isize) -> Option<usize> {
        let n = self.size as isize;
        match self.boundary {
            Boundary::Periodic => Some(j.rem_euclid(n) as usize),
            Boundary::Truncated => (0..n).contains(&j).then_some(j as usize),
        }
    }

    /// Interpolation kernel in units of lattice steps: `sinc_π(u)` on the
    /// line, its periodization on the circle.
    pub fn kernel(&self, u: f64) -> f64 {
        match self.boundary {
            Boundary::Truncated => sinc_pi(u),
            Boundary::Periodic => periodic_kernel(u, self.size),
        }
    }

    /// Periodic lattice momenta `k_n = 2πn/(NΔx)` in ascending `n`, for
    /// `n ∈ [−(N−1)/2, (N−1)/2]` (odd `N`) or `[−N/2+1, N/2−1]` (even `N`,
    /// Nyquist bin excluded).
    pub fn lattice_momenta(&self) -> Vec<f64> {
        let (lo, hi) = mode_range(self.size);
        (lo..=hi).map(|n| self.momentum(n)).collect()
    }

    pub fn momentum(&self, n: i64) -> f64 {
        2.0 * PI * n as f64 / self.circumference()
    }

    pub(crate) fn same_grid(&self, other: &Lattice) -> bool {
        self.spacing == other.spacing
            && self.offset == other.offset
            && self.size == other.size
            && self.boundary == other.boundary
    }

    pub(crate) fn check_same(&self, other: &Lattice) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Signed mode-index range with strictly sub-Nyquist momenta.
pub(crate) fn mode_range(size: usize) -> (i64, i64) {
    let n = size as i64;
    if n % 2 == 1 {
        (-(n - 1) / 2, (n - 1) / 2)
    } else {
        (-n / 2 + 1, n / 2 - 1)
    }
}

/// `Some(n)` if `u` is an integer up to rounding in how `u` was formed.
pub(crate) fn snap_integer(u: f64) -> Option<f64> {
    let r = u.round();
    ((u - r).abs() <= 8.0 * f64::EPSILON * u.abs().max(1.0)).then_some(r)
}

/// `sin(πx)` with the argument reduced mod 2 before multiplying by π.
pub(crate) fn sin_pi(x: f64) -> f64 {
    (PI * (x % 2.0)).sin()
}

/// Bandlimited periodic interpolation kernel on `n` sites, `u` in lattice
/// steps. Odd `n`: Dirichlet kernel `sin(πu)/(n·sin(πu/n))`. Even `n`:
/// `sin(πu)/(n·tan(πu/n))`, which splits the Nyquist mode evenly.
pub fn periodic_kernel(u: f64, n: usize) -> f64 {
    let nf = n as f64;
    let mut v = u % nf;
    if v > nf / 2.0 {
        v -= nf;
    } else if v < -nf / 2.0 {
        v += nf;
    }
    if let Some(r) = snap_integer(v) {
        return if r.rem_euclid(nf) == 0.0 { 1.0 } else { 0.0 };
    }
    if n == 1 {
        return 1.0;
    }
    let arg = PI * v / nf;
    if n % 2 == 1 {
        sin_pi(v) / (nf * arg.sin())
    } else {
        sin_pi(v) / (nf * arg.tan())
    }
}

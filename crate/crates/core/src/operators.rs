//! Bandlimited derivative operators.
//!
//! A [`BanddedKernel`] is a translation-invariant operator stored either as a
//! truncated Toeplitz row `t_m` (with `(Kf)_j = Σ_m t_m f_{j−m}`, i.e.
//! `K_{jk} = t_{j−k}`) or as its Fourier symbol on an odd periodic lattice.
//! Symbols are quoted in the `e^{+ikx}` basis: `ik` for the first derivative
//! and `−k²` for the second.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Amplitude, SampledField};
use crate::lattice::{Boundary, Lattice};
use crate::spectral::{bin_of, fft_convolve, signed_mode, Circulant};
use crate::sum::{kahan_sum, KahanSum};

/// Products whose direct convolution exceeds this many multiply-adds go
/// through the FFT.
const DIRECT_CONVOLUTION_LIMIT: usize = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// `t_{−m} = −t_m`, `t_0 = 0`.
    Antisymmetric,
    /// `t_{−m} = t_m`.
    Symmetric,
}

impl Parity {
    fn product(self, other: Parity) -> Parity {
        if self == other {
            Parity::Symmetric
        } else {
            Parity::Antisymmetric
        }
    }
}

/// Realization of the infinite-lattice operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMode {
    /// Coefficients `t_m` for `|m| ≤ half_width`.
    Toeplitz { half_width: usize },
    /// Exact symbol on `size` (odd) periodic sites.
    Periodic { size: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    /// Index `m + half_width`.
    Toeplitz(Vec<f64>),
    /// Index `n + (size − 1)/2`, ascending signed mode.
    Spectral(Vec<Complex64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BanddedKernel {
    spacing: f64,
    repr: Repr,
    parity: Parity,
    truncation_residual: f64,
}

fn check_mode(spacing: f64, mode: KernelMode) -> Result<()> {
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "spacing must be positive, got {spacing}"
        )));
    }
    match mode {
        KernelMode::Toeplitz { half_width } if half_width < 1 => Err(Error::InvalidParameter(
            "Toeplitz half-width must be at least 1".into(),
        )),
        KernelMode::Periodic { size } if size % 2 == 0 => Err(Error::EvenPeriodicSize(size)),
        KernelMode::Periodic { size } if size < 3 => Err(Error::InvalidParameter(format!(
            "periodic size must be at least 3, got {size}"
        ))),
        _ => Ok(()),
    }
}

fn alternating(m: i64) -> f64 {
    if m % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Infinite-lattice first-derivative coefficient `t_m = (−1)^m/(mΔx)`.
pub fn derivative_coefficient(m: i64, spacing: f64) -> f64 {
    if m == 0 {
        0.0
    } else {
        alternating(m) / (m as f64 * spacing)
    }
}

/// Infinite-lattice second-derivative coefficient: `−π²/(3Δx²)` on the
/// diagonal and `−2(−1)^m/(m²Δx²)` off it.
pub fn second_derivative_coefficient(m: i64, spacing: f64) -> f64 {
    let h2 = spacing * spacing;
    if m == 0 {
        -PI * PI / (3.0 * h2)
    } else {
        let mf = m as f64;
        -2.0 * alternating(m) / (mf * mf * h2)
    }
}

/// First-derivative coefficient wrapped onto an odd periodic lattice of
/// `size` sites: `π(−1)^m / (N·Δx·sin(πm/N))`.
pub fn wrapped_derivative_coefficient(m: i64, size: usize, spacing: f64) -> f64 {
    let n = size as i64;
    let r = m.rem_euclid(n);
    if r == 0 {
        return 0.0;
    }
    let nf = size as f64;
    PI * alternating(m) / (nf * spacing * (PI * m as f64 / nf).sin())
}

/// Second-derivative coefficient wrapped onto an odd periodic lattice:
/// `−π²(N²−1)/(3N²Δx²)` on the diagonal, otherwise
/// `−2π²(−1)^m cos(πm/N) / (N²Δx² sin²(πm/N))`.
pub fn wrapped_second_derivative_coefficient(m: i64, size: usize, spacing: f64) -> f64 {
    let nf = size as f64;
    let h2 = spacing * spacing;
    if m.rem_euclid(size as i64) == 0 {
        return -PI * PI * (nf * nf - 1.0) / (3.0 * nf * nf * h2);
    }
    let arg = PI * m as f64 / nf;
    let s = arg.sin();
    -2.0 * PI * PI * alternating(m) * arg.cos() / (nf * nf * h2 * s * s)
}

impl BanddedKernel {
    /// Bandlimited first derivative `D`.
    pub fn derivative(spacing: f64, mode: KernelMode) -> Result<Self> {
        check_mode(spacing, mode)?;
        Ok(match mode {
            KernelMode::Toeplitz { half_width } => {
                let m = half_width as i64;
                Self {
                    spacing,
                    repr: Repr::Toeplitz(
                        (-m..=m)
                            .map(|i| derivative_coefficient(i, spacing))
                            .collect(),
                    ),
                    parity: Parity::Antisymmetric,
                    truncation_residual: derivative_coefficient(m + 1, spacing).abs(),
                }
            }
            KernelMode::Periodic { size } => {
                Self::from_symbol_fn(spacing, size, Parity::Antisymmetric, |k| {
                    Complex64::new(0.0, k)
                })
            }
        })
    }

    /// Bandlimited second derivative `D₍₂₎`.
    pub fn second_derivative(spacing: f64, mode: KernelMode) -> Result<Self> {
        check_mode(spacing, mode)?;
        Ok(match mode {
            KernelMode::Toeplitz { half_width } => {
                let m = half_width as i64;
                Self {
                    spacing,
                    repr: Repr::Toeplitz(
                        (-m..=m)
                            .map(|i| second_derivative_coefficient(i, spacing))
                            .collect(),
                    ),
                    parity: Parity::Symmetric,
                    truncation_residual: second_derivative_coefficient(m + 1, spacing).abs(),
                }
            }
            KernelMode::Periodic { size } => {
                Self::from_symbol_fn(spacing, size, Parity::Symmetric, |k| {
                    Complex64::new(-k * k, 0.0)
                })
            }
        })
    }

    pub fn identity(spacing: f64, mode: KernelMode) -> Result<Self> {
        check_mode(spacing, mode)?;
        Ok(match mode {
            KernelMode::Toeplitz { half_width } => {
                let mut t = vec![0.0; 2 * half_width + 1];
                t[half_width] = 1.0;
                Self {
                    spacing,
                    repr: Repr::Toeplitz(t),
                    parity: Parity::Symmetric,
                    truncation_residual: 0.0,
                }
            }
            KernelMode::Periodic { size } => {
                Self::from_symbol_fn(spacing, size, Parity::Symmetric, |_| {
                    Complex64::new(1.0, 0.0)
                })
            }
        })
    }

    /// Kernel from explicit Toeplitz coefficients `t_{−M..=M}`.
    pub fn from_toeplitz(spacing: f64, coefficients: Vec<f64>, parity: Parity) -> Result<Self> {
        if coefficients.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(
                "Toeplitz coefficient count must be odd".into(),
            ));
        }
        let half = coefficients.len() / 2;
        check_mode(
            spacing,
            KernelMode::Toeplitz {
                half_width: half.max(1),
            },
        )?;
        for m in 0..=half {
            let (a, b) = (coefficients[half + m], coefficients[half - m]);
            let ok = match parity {
                Parity::Symmetric => a == b,
                Parity::Antisymmetric => a == -b,
            };
            if !ok {
                return Err(Error::InvalidParameter(format!(
                    "coefficients violate {parity:?} at m = {m}"
                )));
            }
        }
        Ok(Self {
            spacing,
            repr: Repr::Toeplitz(coefficients),
            parity,
            truncation_residual: 0.0,
        })
    }

    fn from_symbol_fn(
        spacing: f64,
        size: usize,
        parity: Parity,
        f: impl Fn(f64) -> Complex64,
    ) -> Self {
        let h = (size as i64 - 1) / 2;
        let circumference = size as f64 * spacing;
        let symbol = (-h..=h)
            .map(|n| f(2.0 * PI * n as f64 / circumference))
            .collect();
        Self {
            spacing,
            repr: Repr::Spectral(symbol),
            parity,
            truncation_residual: 0.0,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn mode(&self) -> KernelMode {
        match &self.repr {
            Repr::Toeplitz(t) => KernelMode::Toeplitz {
                half_width: t.len() / 2,
            },
            Repr::Spectral(s) => KernelMode::Periodic { size: s.len() },
        }
    }

    /// Estimate of what truncation dropped: `|t_{M+1}|` for a freshly built
    /// Toeplitz kernel, `Σ|dropped|` after [`compose`], zero for spectral
    /// kernels.
    pub fn truncation_residual(&self) -> f64 {
        self.truncation_residual
    }

    /// Toeplitz coefficient `t_m` (zero beyond the half-width). `None` for
    /// spectral kernels.
    pub fn coefficient(&self, m: i64) -> Option<f64> {
        match &self.repr {
            Repr::Toeplitz(t) => {
                let half = (t.len() / 2) as i64;
                Some(if m.abs() > half {
                    0.0
                } else {
                    t[(m + half) as usize]
                })
            }
            Repr::Spectral(_) => None,
        }
    }

    /// `t_{−M..=M}` for Toeplitz kernels.
    pub fn toeplitz_coefficients(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Toeplitz(t) => Some(t),
            Repr::Spectral(_) => None,
        }
    }

    /// Symbol values in ascending signed mode order, for periodic kernels.
    pub fn symbol(&self) -> Option<&[Complex64]> {
        match &self.repr {
            Repr::Spectral(s) => Some(s),
            Repr::Toeplitz(_) => None,
        }
    }

    /// Lattice momenta matching [`symbol`](Self::symbol).
    pub fn momenta(&self) -> Option<Vec<f64>> {
        let s = self.symbol()?;
        let h = (s.len() as i64 - 1) / 2;
        let circumference = s.len() as f64 * self.spacing;
        Some(
            (-h..=h)
                .map(|n| 2.0 * PI * n as f64 / circumference)
                .collect(),
        )
    }

    /// Symbol of the Toeplitz kernel at `k`: `Σ_m t_m e^{−ikmΔx}`.
    pub fn toeplitz_symbol_at(&self, k: f64) -> Option<Complex64> {
        let t = self.toeplitz_coefficients()?;
        let half = (t.len() / 2) as i64;
        let mut acc = KahanSum::new(Complex64::new(0.0, 0.0));
        for (i, &c) in t.iter().enumerate() {
            let m = i as i64 - half;
            acc.add(c * Complex64::from_polar(1.0, -k * m as f64 * self.spacing));
        }
        Some(acc.total())
    }

    /// `Σ_m t_m` (Toeplitz) or the symbol at `k = 0` (periodic): the action
    /// on a constant field.
    pub fn coefficient_sum(&self) -> f64 {
        match &self.repr {
            Repr::Toeplitz(t) => kahan_sum(t.iter().copied()),
            Repr::Spectral(s) => s[s.len() / 2].re,
        }
    }

    /// Real-space circulant row `c_m`, `m ∈ 0..N`, of a periodic kernel
    /// (`K_{jk} = c_{(j−k) mod N}`), from a direct inverse DFT of the symbol.
    pub fn periodic_coefficients(&self) -> Option<Vec<f64>> {
        let s = self.symbol()?;
        let n = s.len();
        let h = (n as i64 - 1) / 2;
        Some(
            (0..n)
                .map(|m| {
                    let mut acc = KahanSum::new(0.0);
                    for (i, sigma) in s.iter().enumerate() {
                        let mode = i as i64 - h;
                        let phase =
                            2.0 * PI * ((mode * m as i64).rem_euclid(n as i64)) as f64 / n as f64;
                        acc.add((sigma * Complex64::from_polar(1.0, phase)).re);
                    }
                    acc.total() / n as f64
                })
                .collect::<Vec<_>>(),
        )
        .map(|mut c| {
            // Pair c_m with c_{N−m} so the dense matrix has exact parity.
            for m in 1..=(n - 1) / 2 {
                let (a, b) = (c[m], c[n - m]);
                let (a, b) = match self.parity {
                    Parity::Symmetric => ((a + b) / 2.0, (a + b) / 2.0),
                    Parity::Antisymmetric => ((a - b) / 2.0, (b - a) / 2.0),
                };
                c[m] = a;
                c[n - m] = b;
            }
            if self.parity == Parity::Antisymmetric {
                c[0] = 0.0;
            }
            c
        })
    }

    fn circulant(&self) -> Option<Circulant> {
        let s = self.symbol()?;
        let n = s.len();
        let h = (n as i64 - 1) / 2;
        let mut by_bin = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            by_bin[i] = s[(signed_mode(i, n) + h) as usize];
        }
        debug_assert!((0..n).all(|i| bin_of(signed_mode(i, n), n) == i));
        Some(Circulant::new(by_bin))
    }

    /// Dense `N×N` matrix of the operator on `lattice`.
    pub fn to_dense(&self, lattice: &Lattice) -> Result<DMatrix<f64>> {
        self.check_field_lattice(lattice)?;
        let n = lattice.size();
        match &self.repr {
            Repr::Spectral(_) => {
                let c = self.periodic_coefficients().unwrap_or_default();
                Ok(DMatrix::from_fn(n, n, |j, k| {
                    c[(j as i64 - k as i64).rem_euclid(n as i64) as usize]
                }))
            }
            Repr::Toeplitz(t) => {
                let half = (t.len() / 2) as i64;
                let mut out = DMatrix::zeros(n, n);
                for j in 0..n as i64 {
                    for m in -half..=half {
                        if let Some(k) = lattice.wrap_index((j - m) as isize) {
                            out[(j as usize, k)] += t[(m + half) as usize];
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    fn check_field_lattice(&self, lattice: &Lattice) -> Result<()> {
        if lattice.spacing() != self.spacing {
            return Err(Error::KernelMismatch(format!(
                "kernel spacing {} vs lattice spacing {}",
                self.spacing,
                lattice.spacing()
            )));
        }
        if let KernelMode::Periodic { size } = self.mode() {
            if lattice.boundary() != Boundary::Periodic || lattice.size() != size {
                return Err(Error::KernelMismatch(format!(
                    "periodic kernel on {size} sites applied to a {} lattice of {} sites",
                    lattice.boundary(),
                    lattice.size()
                )));
            }
        }
        Ok(())
    }

    /// Apply to a field: discrete convolution for Toeplitz kernels (zero
    /// extension on truncated lattices, wrapping on periodic ones), spectral
    /// multiplication for periodic kernels.
    pub fn apply<T: Amplitude>(&self, field: &SampledField<T>) -> Result<SampledField<T>> {
        self.check_field_lattice(field.lattice())?;
        match &self.repr {
            Repr::Toeplitz(t) => {
                let half = (t.len() / 2) as isize;
                Ok(SampledField::from_fn(*field.lattice(), |j| {
                    let mut acc = KahanSum::new(T::zero());
                    for (i, &c) in t.iter().enumerate() {
                        let m = i as isize - half;
                        if c != 0.0 {
                            acc.add(field.at(j as isize - m) * c);
                        }
                    }
                    acc.total()
                }))
            }
            Repr::Spectral(_) => {
                let op = self.circulant().expect("spectral kernel");
                let mut buf: Vec<Complex64> =
                    field.values().iter().map(|v| v.to_complex()).collect();
                op.apply_in_place(&mut buf);
                SampledField::new(
                    *field.lattice(),
                    buf.into_iter().map(T::from_complex).collect(),
                )
            }
        }
    }

    /// [`apply`](Self::apply) plus a truncation-residual estimate scaled by
    /// the largest input amplitude.
    pub fn apply_with_residual<T: Amplitude>(
        &self,
        field: &SampledField<T>,
    ) -> Result<(SampledField<T>, f64)> {
        let out = self.apply(field)?;
        Ok((out, self.truncation_residual * field.max_abs()))
    }

    /// Operator product `a·b`.
    ///
    /// Periodic: pointwise symbol product, exact. Toeplitz: the full
    /// convolution truncated back to `max(M_a, M_b)`, with the sum of the
    /// dropped coefficient magnitudes recorded as the truncation residual.
    pub fn compose(a: &Self, b: &Self) -> Result<Self> {
        if a.spacing != b.spacing {
            return Err(Error::KernelMismatch(format!(
                "spacing {} vs {}",
                a.spacing, b.spacing
            )));
        }
        let parity = a.parity.product(b.parity);
        match (&a.repr, &b.repr) {
            (Repr::Spectral(sa), Repr::Spectral(sb)) => {
                if sa.len() != sb.len() {
                    return Err(Error::KernelMismatch(format!(
                        "periodic sizes {} vs {}",
                        sa.len(),
                        sb.len()
                    )));
                }
                Ok(Self {
                    spacing: a.spacing,
                    repr: Repr::Spectral(sa.iter().zip(sb).map(|(x, y)| x * y).collect()),
                    parity,
                    truncation_residual: 0.0,
                })
            }
            (Repr::Toeplitz(ta), Repr::Toeplitz(tb)) => {
                let full = if ta.len() * tb.len() <= DIRECT_CONVOLUTION_LIMIT {
                    direct_convolve(ta, tb)
                } else {
                    fft_convolve(ta, tb)
                };
                let full_half = full.len() / 2;
                let keep = (ta.len() / 2).max(tb.len() / 2);
                let lo = full_half - keep;
                let hi = full_half + keep;
                let mut kept = full[lo..=hi].to_vec();
                enforce_parity(&mut kept, parity);
                let dropped = kahan_sum(full[..lo].iter().chain(&full[hi + 1..]).map(|v| v.abs()));
                Ok(Self {
                    spacing: a.spacing,
                    repr: Repr::Toeplitz(kept),
                    parity,
                    truncation_residual: dropped,
                })
            }
            _ => Err(Error::KernelMismatch(
                "cannot compose Toeplitz and periodic kernels".into(),
            )),
        }
    }
}

fn direct_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len() + b.len() - 1;
    (0..len)
        .map(|i| {
            let lo = i.saturating_sub(b.len() - 1);
            let hi = i.min(a.len() - 1);
            let mut acc = KahanSum::new(0.0);
            for j in lo..=hi {
                acc.add(a[j] * b[i - j]);
            }
            acc.total()
        })
        .collect()
}

/// Average out the rounding asymmetry of an FFT convolution.
fn enforce_parity(t: &mut [f64], parity: Parity) {
    let half = t.len() / 2;
    for m in 1..=half {
        let (p, n) = (t[half + m], t[half - m]);
        let (p, n) = match parity {
            Parity::Symmetric => ((p + n) / 2.0, (p + n) / 2.0),
            Parity::Antisymmetric => ((p - n) / 2.0, (n - p) / 2.0),
        };
        t[half + m] = p;
        t[half - m] = n;
    }
    if parity == Parity::Antisymmetric {
        t[half] = 0.0;
    }
}

/// Convenience for [`BanddedKernel::derivative`].
pub fn derivative_kernel(spacing: f64, mode: KernelMode) -> Result<BanddedKernel> {
    BanddedKernel::derivative(spacing, mode)
}

/// Convenience for [`BanddedKernel::second_derivative`].
pub fn second_derivative_kernel(spacing: f64, mode: KernelMode) -> Result<BanddedKernel> {
    BanddedKernel::second_derivative(spacing, mode)
}

/// The derivative kernel natural to a lattice: spectral on periodic
/// lattices, full-width Toeplitz (`M = N − 1`) on truncated ones.
pub fn lattice_derivative(lattice: &Lattice) -> Result<BanddedKernel> {
    match lattice.boundary() {
        Boundary::Periodic => BanddedKernel::derivative(
            lattice.spacing(),
            KernelMode::Periodic {
                size: lattice.size(),
            },
        ),
        Boundary::Truncated => BanddedKernel::derivative(
            lattice.spacing(),
            KernelMode::Toeplitz {
                half_width: lattice.size().saturating_sub(1).max(1),
            },
        ),
    }
}

/// `Σ_{l=−L..L, l∉{0,m}} 1/(l(l−m))`, which tends to `2/m²` with an
/// `O(1/L)` tail.
pub fn partial_sum_s(m: i64, cutoff: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be nonzero".into()));
    }
    if cutoff <= m.unsigned_abs() {
        return Err(Error::InvalidParameter(format!(
            "cutoff {cutoff} must exceed |m| = {}",
            m.abs()
        )));
    }
    // l → −l maps S(−m) onto S(m) term by term.
    let m = m.abs();
    let l_max = cutoff as i64;
    let mut acc = KahanSum::new(0.0);
    for l in -l_max..=l_max {
        if l == 0 || l == m {
            continue;
        }
        acc.add(1.0 / (l as f64 * (l - m) as f64));
    }
    Ok(acc.total())
}

/// `Σ_{l=1}^{L} 1/l²`.
pub fn basel_partial_sum(cutoff: u64) -> f64 {
    let mut acc = KahanSum::new(0.0);
    for l in 1..=cutoff {
        let lf = l as f64;
        acc.add(1.0 / (lf * lf));
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_coefficients_on_the_line() {
        let d = derivative_kernel(1.0, KernelMode::Toeplitz { half_width: 5 }).unwrap();
        assert_eq!(d.coefficient(0), Some(0.0));
        // K_{j,j+1} = t_{−1}, K_{j,j−1} = t_{1}.
        assert_eq!(d.coefficient(-1), Some(1.0));
        assert_eq!(d.coefficient(1), Some(-1.0));
        assert_eq!(d.coefficient(2), Some(0.5));
        assert_eq!(d.coefficient(6), Some(0.0));
        assert_eq!(d.parity(), Parity::Antisymmetric);
    }

    #[test]
    fn second_derivative_coefficients() {
        let d2 = second_derivative_kernel(1.0, KernelMode::Toeplitz { half_width: 3 }).unwrap();
        assert!((d2.coefficient(0).unwrap() + PI * PI / 3.0).abs() < 1e-15);
        assert!((d2.coefficient(0).unwrap() + 3.289868).abs() < 1e-6);
        assert_eq!(d2.coefficient(1), Some(2.0));
        assert_eq!(d2.coefficient(-1), Some(2.0));
        assert_eq!(d2.coefficient(2), Some(-0.5));
        let scaled = second_derivative_kernel(0.5, KernelMode::Toeplitz { half_width: 3 }).unwrap();
        assert_eq!(scaled.coefficient(1), Some(8.0));
    }

    #[test]
    fn even_periodic_size_rejected() {
        assert!(matches!(
            derivative_kernel(1.0, KernelMode::Periodic { size: 8 }),
            Err(Error::EvenPeriodicSize(8))
        ));
        assert!(second_derivative_kernel(1.0, KernelMode::Periodic { size: 10 }).is_err());
        assert!(derivative_kernel(1.0, KernelMode::Toeplitz { half_width: 0 }).is_err());
        assert!(derivative_kernel(-1.0, KernelMode::Periodic { size: 9 }).is_err());
    }

    #[test]
    fn kills_constants() {
        let lat = Lattice::periodic(1.0, 9).unwrap();
        let ones = SampledField::from_fn(lat, |_| 1.0);
        let d = derivative_kernel(1.0, KernelMode::Periodic { size: 9 }).unwrap();
        assert!(d.apply(&ones).unwrap().max_abs() < 1e-15);
        let d2 = second_derivative_kernel(1.0, KernelMode::Periodic { size: 9 }).unwrap();
        assert_eq!(d2.coefficient_sum(), 0.0);
        assert!(d2.apply(&ones).unwrap().max_abs() < 1e-14);

        let dt = derivative_kernel(1.0, KernelMode::Toeplitz { half_width: 50 }).unwrap();
        assert!(dt.apply(&ones).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn toeplitz_second_derivative_sum_vanishes_at_large_width() {
        let d2 = second_derivative_kernel(
            1.0,
            KernelMode::Toeplitz {
                half_width: 1_000_000,
            },
        )
        .unwrap();
        assert!(d2.coefficient_sum().abs() < 1e-9);
        // Oracle: −π²/3 + 4·Σ_{m≥1} (−1)^{m+1}/m², summed independently.
        let partial: f64 = (1..=1_000_000u64)
            .rev()
            .map(|m| if m % 2 == 1 { 1.0 } else { -1.0 } / (m as f64 * m as f64))
            .sum();
        assert!((-PI * PI / 3.0 + 4.0 * partial).abs() < 1e-9);
    }

    #[test]
    fn delta_response_is_kernel_column() {
        let lat = Lattice::truncated(1.0, 41).unwrap();
        let delta = SampledField::kronecker(lat, 20, 1.0);
        let d = lattice_derivative(&lat).unwrap();
        let out = d.apply(&delta).unwrap();
        for (j, v) in out.values().iter().enumerate() {
            let m = j as i64 - 20;
            // (Dδ)_j = D_{j,20} = (−1)^m / m: the true derivative of sinc_π at m.
            let expected = if m == 0 {
                0.0
            } else {
                alternating(m) / m as f64
            };
            assert_eq!(*v, expected);
        }
    }

    #[test]
    fn wrapped_coefficients_match_inverse_dft() {
        for &n in &[3usize, 9, 31] {
            let d = derivative_kernel(0.7, KernelMode::Periodic { size: n }).unwrap();
            let d2 = second_derivative_kernel(0.7, KernelMode::Periodic { size: n }).unwrap();
            let c1 = d.periodic_coefficients().unwrap();
            let c2 = d2.periodic_coefficients().unwrap();
            for m in 0..n {
                assert!((c1[m] - wrapped_derivative_coefficient(m as i64, n, 0.7)).abs() < 1e-12);
                assert!(
                    (c2[m] - wrapped_second_derivative_coefficient(m as i64, n, 0.7)).abs() < 1e-11
                );
            }
        }
    }

    #[test]
    fn wrapped_derivative_is_image_sum() {
        // Σ_l (−1)^{m+lN}/(m+lN) for odd N, summed symmetrically.
        let n = 7i64;
        for m in 1..n {
            let mut acc = 0.0;
            for l in -200_000..=200_000i64 {
                let r = m + l * n;
                acc += alternating(r) / r as f64;
            }
            assert!((acc - wrapped_derivative_coefficient(m, n as usize, 1.0)).abs() < 1e-5);
        }
    }

    #[test]
    fn compose_with_identity() {
        let d = derivative_kernel(1.0, KernelMode::Toeplitz { half_width: 20 }).unwrap();
        let id = BanddedKernel::identity(1.0, KernelMode::Toeplitz { half_width: 3 }).unwrap();
        let c = BanddedKernel::compose(&d, &id).unwrap();
        assert_eq!(c.toeplitz_coefficients(), d.toeplitz_coefficients());
        assert_eq!(c.parity(), Parity::Antisymmetric);

        let dp = derivative_kernel(1.0, KernelMode::Periodic { size: 11 }).unwrap();
        let idp = BanddedKernel::identity(1.0, KernelMode::Periodic { size: 11 }).unwrap();
        assert_eq!(
            BanddedKernel::compose(&dp, &idp).unwrap().symbol(),
            dp.symbol()
        );
    }

    #[test]
    fn compose_mode_mismatch() {
        let d = derivative_kernel(1.0, KernelMode::Toeplitz { half_width: 2 }).unwrap();
        let p = derivative_kernel(1.0, KernelMode::Periodic { size: 5 }).unwrap();
        assert!(BanddedKernel::compose(&d, &p).is_err());
        let q = derivative_kernel(1.0, KernelMode::Periodic { size: 7 }).unwrap();
        assert!(BanddedKernel::compose(&p, &q).is_err());
        let r = derivative_kernel(0.5, KernelMode::Toeplitz { half_width: 2 }).unwrap();
        assert!(BanddedKernel::compose(&d, &r).is_err());
    }

    #[test]
    fn compose_squares_diagonal_toward_second_derivative() {
        let d = derivative_kernel(1.0, KernelMode::Toeplitz { half_width: 400 }).unwrap();
        let dd = BanddedKernel::compose(&d, &d).unwrap();
        // Diagonal: −2·Σ_{l=1}^{M} 1/l².
        let expected = -2.0 * basel_partial_sum(400);
        assert!((dd.coefficient(0).unwrap() - expected).abs() < 1e-13);
        assert!(dd.truncation_residual() > 0.0);
        assert_eq!(dd.parity(), Parity::Symmetric);
    }

    #[test]
    fn fft_and_direct_convolution_agree() {
        let d = derivative_kernel(1.0, KernelMode::Toeplitz { half_width: 300 }).unwrap();
        let t = d.toeplitz_coefficients().unwrap();
        let a = direct_convolve(t, t);
        let b = fft_convolve(t, t);
        let worst = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12);
    }

    #[test]
    fn partial_sums() {
        assert!(partial_sum_s(0, 10).is_err());
        assert!(partial_sum_s(3, 3).is_err());
        assert_eq!(
            partial_sum_s(2, 5000).unwrap(),
            partial_sum_s(-2, 5000).unwrap()
        );
        assert!((partial_sum_s(1, 1_000_000).unwrap() - 2.0).abs() < 5e-6);
        assert!((partial_sum_s(3, 1_000_000).unwrap() - 2.0 / 9.0).abs() < 5e-6);
        assert!((basel_partial_sum(1_000_000) - PI * PI / 6.0).abs() < 2e-6);
    }

    #[test]
    fn dense_matrix_is_antisymmetric() {
        let lat = Lattice::periodic(1.0, 9).unwrap();
        let d = lattice_derivative(&lat).unwrap().to_dense(&lat).unwrap();
        assert!((&d + d.transpose()).amax() < 1e-15);
        let tl = Lattice::truncated(1.0, 9).unwrap();
        let dt = lattice_derivative(&tl).unwrap().to_dense(&tl).unwrap();
        assert_eq!(dt.clone(), -dt.transpose());
        assert_eq!(dt[(0, 1)], 1.0);
    }
}

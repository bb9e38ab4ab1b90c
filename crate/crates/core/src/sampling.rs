//! Sampling, Shannon reconstruction and lattice-sum integration.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Amplitude, SampledField};
use crate::lattice::{sin_pi, snap_integer, Boundary, Lattice};
use crate::sum::KahanSum;

/// Normalized sinc, `sin(πx)/(πx)` with `sinc_π(0) = 1`.
///
/// Exactly zero on nonzero integers, which makes reconstruction at lattice
/// sites reproduce the samples bit for bit.
pub fn sinc_pi(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    if let Some(r) = snap_integer(x) {
        return if r == 0.0 { 1.0 } else { 0.0 };
    }
    sin_pi(x) / (PI * x)
}

/// Closed-form bandlimited functions used to probe the lattice machinery.
///
/// Plane waves follow the `e^{−ikx}` phase convention.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    PlaneWave {
        k: f64,
    },
    /// `Σ_n c_n e^{−i k_n x}`.
    FourierSum(Vec<(f64, Complex64)>),
    /// The interpolation kernel of the sampling lattice centred at `center`:
    /// `sinc_π((x − center)/Δx)`, periodized on periodic lattices.
    SincPulse {
        center: f64,
    },
}

impl TestFunction {
    pub fn plane_wave(k: f64) -> Self {
        TestFunction::PlaneWave { k }
    }

    /// `cos(kx)` as a two-term Fourier sum.
    pub fn cosine(k: f64, amplitude: f64) -> Self {
        let half = Complex64::new(amplitude / 2.0, 0.0);
        TestFunction::FourierSum(vec![(k, half), (-k, half)])
    }

    /// `sin(kx)` as a two-term Fourier sum.
    pub fn sine(k: f64, amplitude: f64) -> Self {
        // e^{−ikx} = cos − i sin, so sin(kx) = (i/2)(e^{−ikx} − e^{ikx}).
        let c = Complex64::new(0.0, amplitude / 2.0);
        TestFunction::FourierSum(vec![(k, c), (-k, -c)])
    }

    /// Plane-wave components, or `None` for the sinc pulse.
    pub fn components(&self) -> Option<Vec<(f64, Complex64)>> {
        match self {
            TestFunction::PlaneWave { k } => Some(vec![(*k, Complex64::new(1.0, 0.0))]),
            TestFunction::FourierSum(terms) => Some(terms.clone()),
            TestFunction::SincPulse { .. } => None,
        }
    }

    pub fn max_wavenumber(&self) -> Option<f64> {
        self.components()
            .map(|c| c.iter().map(|(k, _)| k.abs()).fold(0.0, f64::max))
    }

    /// Value at `x`. The lattice only matters for the sinc pulse.
    pub fn eval(&self, lattice: &Lattice, x: f64) -> Complex64 {
        match self {
            TestFunction::SincPulse { center } => {
                Complex64::new(lattice.kernel((x - center) / lattice.spacing()), 0.0)
            }
            _ => {
                let mut acc = KahanSum::new(Complex64::new(0.0, 0.0));
                for (k, c) in self.components().unwrap_or_default() {
                    acc.add(c * Complex64::from_polar(1.0, -k * x));
                }
                acc.total()
            }
        }
    }

    /// `x ↦ f(x − a)`.
    pub fn shifted(&self, a: f64) -> Self {
        match self {
            TestFunction::SincPulse { center } => TestFunction::SincPulse { center: center + a },
            _ => TestFunction::FourierSum(
                self.components()
                    .unwrap_or_default()
                    .into_iter()
                    .map(|(k, c)| (k, c * Complex64::from_polar(1.0, k * a)))
                    .collect(),
            ),
        }
    }

    /// Analytic derivative; `None` for the sinc pulse.
    pub fn derivative(&self) -> Option<Self> {
        self.components().map(|terms| {
            TestFunction::FourierSum(
                terms
                    .into_iter()
                    .map(|(k, c)| (k, c * Complex64::new(0.0, -k)))
                    .collect(),
            )
        })
    }

    /// Check that every component sits strictly inside the band of `lattice`
    /// and, on a periodic lattice, is one of its lattice momenta.
    pub fn check_bandlimited(&self, lattice: &Lattice) -> Result<()> {
        let Some(terms) = self.components() else {
            return Ok(());
        };
        let bandlimit = lattice.bandlimit();
        for (k, _) in terms {
            if k.is_nan() || k.abs() >= bandlimit {
                return Err(Error::OutsideBand { k, bandlimit });
            }
            if lattice.boundary() == Boundary::Periodic {
                let index = k * lattice.circumference() / (2.0 * PI);
                if (index - index.round()).abs() > 1e-9 {
                    return Err(Error::NotPeriodic { k, index });
                }
            }
        }
        Ok(())
    }
}

/// `values[j] = f(x_j)`.
pub fn sample(f: &TestFunction, lattice: &Lattice) -> Result<SampledField<Complex64>> {
    f.check_bandlimited(lattice)?;
    Ok(SampledField::from_fn(*lattice, |j| {
        f.eval(lattice, lattice.point(j as isize))
    }))
}

/// Shannon reconstruction `Σ_j values[j]·K((x − x_j)/Δx)` with `K` the
/// lattice kernel.
///
/// Logs a warning when `x` falls in the edge-contaminated margin of a
/// truncated lattice.
pub fn reconstruct<T: Amplitude>(field: &SampledField<T>, x: f64) -> T {
    let lattice = field.lattice();
    if !lattice.is_trusted(x) {
        log::warn!(
            "reconstruction at x = {x} lies within {} sites of a truncated lattice edge",
            lattice.edge_margin()
        );
    }
    interpolate(field, (x - lattice.offset()) / lattice.spacing())
}

/// Reconstruction at `x = x_0 + s·Δx` without the edge warning.
pub(crate) fn interpolate<T: Amplitude>(field: &SampledField<T>, s: f64) -> T {
    let lattice = field.lattice();
    let nearest = s.round();
    let s = if (s - nearest).abs() <= 8.0 * f64::EPSILON * nearest.abs().max(1.0) {
        nearest
    } else {
        s
    };
    let mut acc = KahanSum::new(T::zero());
    for (j, &v) in field.values().iter().enumerate() {
        let w = lattice.kernel(s - j as f64);
        if w != 0.0 {
            acc.add(v * w);
        }
    }
    acc.total()
}

/// Reconstruct on a new lattice of the same spacing, size and boundary with
/// offset `new_offset`.
pub fn resample<T: Amplitude>(field: &SampledField<T>, new_offset: f64) -> Result<SampledField<T>> {
    let lattice = field.lattice();
    let target = lattice.with_offset(new_offset)?;
    let shift = (new_offset - lattice.offset()) / lattice.spacing();
    Ok(SampledField::from_fn(target, |k| {
        interpolate(field, k as f64 + shift)
    }))
}

/// `Δx·Σ_j conj(f_j)·g_j`: the integral of the product of the two
/// reconstructed fields.
pub fn integrate_product<T: Amplitude>(f: &SampledField<T>, g: &SampledField<T>) -> Result<T> {
    f.lattice().check_same(g.lattice())?;
    let mut acc = KahanSum::new(T::zero());
    for (&a, &b) in f.values().iter().zip(g.values()) {
        acc.add(a.conj() * b);
    }
    Ok(acc.total() * f.lattice().spacing())
}

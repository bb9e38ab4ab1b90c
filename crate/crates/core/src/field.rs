use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// Scalar type a lattice field can carry: `f64` or `Complex64`.
pub trait Amplitude:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn conj(self) -> Self;
    fn to_complex(self) -> Complex64;
    /// Real amplitudes keep only the real part.
    fn from_complex(c: Complex64) -> Self;
    fn magnitude(self) -> f64;
}

impl Amplitude for f64 {
    fn zero() -> Self {
        0.0
    }
    fn conj(self) -> Self {
        self
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn from_complex(c: Complex64) -> Self {
        c.re
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Amplitude for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn from_complex(c: Complex64) -> Self {
        c
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Field amplitudes on every site of a [`Lattice`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField<T = f64> {
    lattice: Lattice,
    values: Vec<T>,
}

impl<T: Amplitude> SampledField<T> {
    pub fn new(lattice: Lattice, values: Vec<T>) -> Result<Self> {
        if values.len() != lattice.size() {
            return Err(Error::LatticeMismatch(format!(
                "{} values for a lattice of {} sites",
                values.len(),
                lattice.size()
            )));
        }
        Ok(Self { lattice, values })
    }

    pub fn zeros(lattice: Lattice) -> Self {
        Self {
            values: vec![T::zero(); lattice.size()],
            lattice,
        }
    }

    pub fn from_fn(lattice: Lattice, f: impl FnMut(usize) -> T) -> Self {
        Self {
            values: (0..lattice.size()).map(f).collect(),
            lattice,
        }
    }

    /// Unit amplitude at site `j`, zero elsewhere.
    pub fn kronecker(lattice: Lattice, j: usize, one: T) -> Self {
        Self::from_fn(lattice, |i| if i == j { one } else { T::zero() })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at an unbounded site index: wrapped on periodic lattices, zero
    /// off the ends of truncated ones.
    pub fn at(&self, j: isize) -> T {
        self.lattice
            .wrap_index(j)
            .map_or(T::zero(), |i| self.values[i])
    }

    pub fn map<U: Amplitude>(&self, f: impl Fn(T) -> U) -> SampledField<U> {
        SampledField {
            lattice: self.lattice,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Same values, relabelled onto another grid of equal size.
    pub fn relabel(&self, lattice: Lattice) -> Result<Self> {
        Self::new(lattice, self.values.clone())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.lattice.check_same(&other.lattice)?;
        Ok(Self {
            lattice: self.lattice,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn to_complex(&self) -> SampledField<Complex64> {
        self.map(Amplitude::to_complex)
    }

    /// One-site cyclic shift: `out[j] = self[j − 1]`.
    pub fn roll(&self, steps: isize) -> Self {
        Self::from_fn(self.lattice, |j| self.at(j as isize - steps))
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.magnitude())
            .fold(0.0, f64::max)
    }

    /// Largest pointwise difference magnitude.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| (a - b).magnitude())
            .fold(0.0, f64::max)
    }
}

impl SampledField<Complex64> {
    pub fn real_part(&self) -> SampledField<f64> {
        self.map(|c| c.re)
    }

    pub fn imag_part(&self) -> SampledField<f64> {
        self.map(|c| c.im)
    }
}

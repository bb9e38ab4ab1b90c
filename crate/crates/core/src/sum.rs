//! Compensated summation.
//!
//! Every reduction in the crate goes through [`KahanSum`] in ascending index
//! order so results are bit-reproducible.

use std::ops::{Add, Sub};

#[derive(Clone, Copy, Debug)]
pub struct KahanSum<T> {
    sum: T,
    carry: T,
}

impl<T> KahanSum<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    pub fn new(zero: T) -> Self {
        Self {
            sum: zero,
            carry: zero,
        }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn total(&self) -> T {
        self.sum
    }
}

/// Compensated sum of an `f64` iterator.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = KahanSum::new(0.0);
    for v in values {
        acc.add(v);
    }
    acc.total()
}

//! FFT-backed circulant operators on periodic lattices.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Signed mode index of FFT bin `i` on `n` points.
pub(crate) fn signed_mode(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// FFT bin holding signed mode `m`.
pub(crate) fn bin_of(m: i64, n: usize) -> usize {
    m.rem_euclid(n as i64) as usize
}

/// Multiplication by a Fourier symbol on `n` periodic sites.
///
/// The symbol is stored in FFT bin order and acts on the `e^{+ik_n x}`
/// components of a field.
#[derive(Clone)]
pub(crate) struct Circulant {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    symbol: Vec<Complex64>,
}

impl Circulant {
    pub(crate) fn new(symbol_by_bin: Vec<Complex64>) -> Self {
        let n = symbol_by_bin.len();
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            symbol: symbol_by_bin,
        }
    }

    pub(crate) fn apply_in_place(&self, buf: &mut [Complex64]) {
        let n = buf.len() as f64;
        self.forward.process(buf);
        for (v, s) in buf.iter_mut().zip(&self.symbol) {
            *v *= s / n;
        }
        self.inverse.process(buf);
    }

    pub(crate) fn apply_real(&self, input: &[f64], out: &mut [f64]) {
        let mut buf: Vec<Complex64> = input.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.apply_in_place(&mut buf);
        for (o, v) in out.iter_mut().zip(buf) {
            *o = v.re;
        }
    }
}

/// Linear convolution of two real sequences via zero-padded FFT.
pub(crate) fn fft_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len() + b.len() - 1;
    let size = len.next_power_of_two();
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    let mut fa = vec![Complex64::new(0.0, 0.0); size];
    let mut fb = fa.clone();
    for (dst, &v) in fa.iter_mut().zip(a) {
        dst.re = v;
    }
    for (dst, &v) in fb.iter_mut().zip(b) {
        dst.re = v;
    }
    forward.process(&mut fa);
    forward.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inverse.process(&mut fa);
    let scale = 1.0 / size as f64;
    fa[..len].iter().map(|v| v.re * scale).collect()
}

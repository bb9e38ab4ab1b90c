//! Seeded random states and Hamiltonians for property runs.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::SampledField;
use crate::hamiltonian::{Couplings, QuadraticLatticeHamiltonian};
use crate::lattice::{Boundary, Lattice};
use crate::sampling::{sample, TestFunction};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Real-valued Fourier sum with `terms` conjugate pairs of wavenumbers
/// `|k| ≤ max_fraction·Ω`. On periodic lattices the wavenumbers are drawn
/// from the lattice momenta.
pub fn random_test_function<R: Rng>(
    lattice: &Lattice,
    max_fraction: f64,
    terms: usize,
    rng: &mut R,
) -> TestFunction {
    let kmax = max_fraction * lattice.bandlimit();
    let mut comps = Vec::with_capacity(2 * terms + 1);
    for _ in 0..terms {
        let k = match lattice.boundary() {
            Boundary::Periodic => {
                let nmax =
                    (kmax * lattice.circumference() / (2.0 * std::f64::consts::PI)).floor() as i64;
                lattice.momentum(rng.gen_range(-nmax..=nmax))
            }
            Boundary::Truncated => rng.gen_range(-kmax..=kmax),
        };
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 0.5;
        comps.push((k, c));
        comps.push((-k, c.conj()));
    }
    TestFunction::FourierSum(comps)
}

/// Samples of [`random_test_function`].
pub fn random_bandlimited_field<R: Rng>(
    lattice: &Lattice,
    max_fraction: f64,
    terms: usize,
    rng: &mut R,
) -> Result<SampledField> {
    let f = random_test_function(lattice, max_fraction, terms, rng);
    Ok(sample(&f, lattice)?.real_part())
}

/// Random `(q, p)` pair of bandlimited fields, each rescaled to peak
/// magnitude `amplitude`.
pub fn random_phase_space_state<R: Rng>(
    lattice: &Lattice,
    amplitude: f64,
    rng: &mut R,
) -> Result<(SampledField, SampledField)> {
    let draw = |rng: &mut R| -> Result<SampledField> {
        let f = random_bandlimited_field(lattice, 0.9, 6, rng)?;
        let peak = f.max_abs();
        Ok(if peak > 0.0 {
            f.scale(amplitude / peak)
        } else {
            f
        })
    };
    let q = draw(rng)?;
    let p = draw(rng)?;
    Ok((q, p))
}

/// Translation-invariant quadratic Hamiltonian with random couplings bounded
/// by `|c[m]| ≤ 1/max(1,|m|)³` in all three blocks (including `q·p`).
pub fn random_quadratic_hamiltonian<R: Rng>(
    lattice: &Lattice,
    half_width: usize,
    rng: &mut R,
) -> QuadraticLatticeHamiltonian {
    let block = |rng: &mut R| {
        let w = half_width as i64;
        let values = (-w..=w)
            .map(|m| rng.gen_range(-1.0..=1.0) / (m.unsigned_abs().max(1) as f64).powi(3))
            .collect();
        Couplings::from_values(values).expect("odd, finite")
    };
    let qq = block(rng);
    let qp = block(rng);
    let pp = block(rng);
    QuadraticLatticeHamiltonian::new(*lattice, qq, qp, pp)
        .expect("valid couplings")
        .with_label("random-quadratic")
}

//! Bandlimited lattice field theory.
//!
//! A field whose spatial spectrum is confined to `|k| < π/Δx` is fully
//! determined by its samples on a lattice of spacing `Δx`. This crate builds
//! the machinery that follows from that fact:
//!
//! * [`sampling`]: sinc reconstruction, resampling between offset lattices and
//!   exact integration of products by lattice sums.
//! * [`operators`]: the nonlocal (SLAC) first and second derivative kernels in
//!   Toeplitz and periodic spectral form.
//! * [`hamiltonian`]: translation-invariant quadratic lattice Hamiltonians, the
//!   bandlimited Klein–Gordon field and the harmonic chain.
//! * [`symmetry`]: the lattice total-momentum operator, its conservation under
//!   quadratic dynamics and its violation by cubic interactions.
//!
//! Units: `ħ = 1`. Lattice fields are `q_j = φ(x_j)` and `p_j = Δx·π(x_j)`.

pub mod error;
pub mod field;
pub mod hamiltonian;
pub mod io;
pub mod lattice;
pub mod operators;
pub mod random;
pub mod sampling;
mod spectral;
pub mod sum;
pub mod symmetry;

pub use error::{Error, Result};
pub use field::{Amplitude, SampledField};
pub use hamiltonian::{DispersionCurve, Model, PhaseSpaceForm, QuadraticLatticeHamiltonian};
pub use lattice::{Boundary, Lattice};
pub use operators::{BanddedKernel, KernelMode, Parity};
pub use sampling::{sinc_pi, TestFunction};
pub use symmetry::{SymplecticForm, TotalMomentum};

pub use num_complex::Complex64;

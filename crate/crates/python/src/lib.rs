use bandlattice::field::SampledField;
use bandlattice::operators::{self, KernelMode};
use bandlattice::random::{random_phase_space_state, random_quadratic_hamiltonian, seeded};
use bandlattice::sampling::{self, TestFunction as CoreTestFunction};
use bandlattice::symmetry::{self, FlowConfig};
use bandlattice::{BanddedKernel, Boundary, Complex64, QuadraticLatticeHamiltonian};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: bandlattice::Error) -> PyErr {
    match e {
        bandlattice::Error::Io(_) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_boundary(s: &str) -> PyResult<Boundary> {
    s.parse().map_err(to_py)
}

/// Uniform grid `x_j = j*dx + b` with periodic or truncated boundary.
#[pyclass(
    name = "Lattice",
    module = "bandlattice_py",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
pub struct PyLattice {
    inner: bandlattice::Lattice,
}

#[pymethods]
impl PyLattice {
    #[new]
    #[pyo3(signature = (dx = 1.0, n = 257, b = 0.0, boundary = "periodic"))]
    fn new(dx: f64, n: usize, b: f64, boundary: &str) -> PyResult<Self> {
        let inner =
            bandlattice::Lattice::new(dx, b, n, parse_boundary(boundary)?).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.inner.spacing()
    }

    #[getter]
    fn b(&self) -> f64 {
        self.inner.offset()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.size()
    }

    #[getter]
    fn boundary(&self) -> String {
        self.inner.boundary().to_string()
    }

    #[getter]
    fn bandlimit(&self) -> f64 {
        self.inner.bandlimit()
    }

    fn points(&self) -> Vec<f64> {
        self.inner.points()
    }

    fn lattice_momenta(&self) -> Vec<f64> {
        self.inner.lattice_momenta()
    }

    fn with_offset(&self, b: f64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.with_offset(b).map_err(to_py)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Lattice(dx={}, n={}, b={}, boundary='{}')",
            self.inner.spacing(),
            self.inner.size(),
            self.inner.offset(),
            self.inner.boundary()
        )
    }
}

/// Closed-form bandlimited function.
#[pyclass(
    name = "TestFunction",
    module = "bandlattice_py",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
pub struct PyTestFunction {
    inner: CoreTestFunction,
}

#[pymethods]
impl PyTestFunction {
    /// `exp(-i k x)`
    #[staticmethod]
    fn plane_wave(k: f64) -> Self {
        Self {
            inner: CoreTestFunction::plane_wave(k),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (k, amplitude = 1.0))]
    fn cosine(k: f64, amplitude: f64) -> Self {
        Self {
            inner: CoreTestFunction::cosine(k, amplitude),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (k, amplitude = 1.0))]
    fn sine(k: f64, amplitude: f64) -> Self {
        Self {
            inner: CoreTestFunction::sine(k, amplitude),
        }
    }

    /// Sum of `c * exp(-i k x)` over `(k, c)` pairs.
    #[staticmethod]
    fn fourier_sum(components: Vec<(f64, Complex64)>) -> Self {
        Self {
            inner: CoreTestFunction::FourierSum(components),
        }
    }

    #[staticmethod]
    fn sinc_pulse(center: f64) -> Self {
        Self {
            inner: CoreTestFunction::SincPulse { center },
        }
    }

    fn eval(&self, lattice: &PyLattice, x: f64) -> Complex64 {
        self.inner.eval(&lattice.inner, x)
    }

    /// The function `f(x - a)`.
    fn shifted(&self, a: f64) -> Self {
        Self {
            inner: self.inner.shifted(a),
        }
    }

    fn derivative(&self) -> PyResult<Self> {
        self.inner
            .derivative()
            .map(|inner| Self { inner })
            .ok_or_else(|| PyValueError::new_err("derivative is only available for Fourier sums"))
    }
}

/// Samples on a lattice. Values are complex; real-valued operations check
/// that the imaginary parts vanish.
#[pyclass(name = "Field", module = "bandlattice_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyField {
    inner: SampledField<Complex64>,
}

impl PyField {
    fn from_real(f: SampledField) -> Self {
        Self {
            inner: f.to_complex(),
        }
    }

    fn real(&self) -> PyResult<SampledField> {
        let scale = self.inner.max_abs().max(1.0);
        if self
            .inner
            .values()
            .iter()
            .any(|v| v.im.abs() > 1e-12 * scale)
        {
            return Err(PyValueError::new_err("expected a real-valued field"));
        }
        Ok(self.inner.real_part())
    }
}

#[pymethods]
impl PyField {
    #[new]
    fn new(lattice: &PyLattice, values: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self {
            inner: SampledField::new(lattice.inner, values).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn kronecker(lattice: &PyLattice, j: usize) -> Self {
        Self::from_real(SampledField::kronecker(lattice.inner, j, 1.0))
    }

    #[getter]
    fn lattice(&self) -> PyLattice {
        PyLattice {
            inner: *self.inner.lattice(),
        }
    }

    fn values(&self) -> Vec<Complex64> {
        self.inner.values().to_vec()
    }

    fn real_part(&self) -> Vec<f64> {
        self.inner.real_part().into_values()
    }

    fn imag_part(&self) -> Vec<f64> {
        self.inner.imag_part().into_values()
    }

    fn reconstruct(&self, x: f64) -> Complex64 {
        sampling::reconstruct(&self.inner, x)
    }

    fn resample(&self, b: f64) -> PyResult<Self> {
        Ok(Self {
            inner: sampling::resample(&self.inner, b).map_err(to_py)?,
        })
    }

    /// Samples of `phi(x - a)`.
    fn translate(&self, a: f64) -> Self {
        Self {
            inner: symmetry::translate_field(&self.inner, a),
        }
    }

    fn roll(&self, steps: isize) -> Self {
        Self {
            inner: self.inner.roll(steps),
        }
    }

    fn max_abs_diff(&self, other: &PyField) -> f64 {
        self.inner.max_abs_diff(&other.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Translation-invariant lattice operator (SLAC derivatives and friends).
#[pyclass(
    name = "Kernel",
    module = "bandlattice_py",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
pub struct PyKernel {
    inner: BanddedKernel,
}

fn kernel_mode(n: Option<usize>, half_width: Option<usize>) -> PyResult<KernelMode> {
    match (n, half_width) {
        (Some(size), None) => Ok(KernelMode::Periodic { size }),
        (None, Some(half_width)) => Ok(KernelMode::Toeplitz { half_width }),
        _ => Err(PyValueError::new_err(
            "give exactly one of n (periodic) or half_width (Toeplitz)",
        )),
    }
}

#[pymethods]
impl PyKernel {
    #[staticmethod]
    #[pyo3(signature = (dx, n = None, half_width = None))]
    fn derivative(dx: f64, n: Option<usize>, half_width: Option<usize>) -> PyResult<Self> {
        let inner = operators::derivative_kernel(dx, kernel_mode(n, half_width)?).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (dx, n = None, half_width = None))]
    fn second_derivative(dx: f64, n: Option<usize>, half_width: Option<usize>) -> PyResult<Self> {
        let inner =
            operators::second_derivative_kernel(dx, kernel_mode(n, half_width)?).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn apply(&self, field: &PyField) -> PyResult<PyField> {
        Ok(PyField {
            inner: self.inner.apply(&field.inner).map_err(to_py)?,
        })
    }

    fn compose(&self, other: &PyKernel) -> PyResult<Self> {
        Ok(Self {
            inner: BanddedKernel::compose(&self.inner, &other.inner).map_err(to_py)?,
        })
    }

    fn coefficient(&self, m: i64) -> Option<f64> {
        self.inner.coefficient(m)
    }

    fn symbol(&self) -> Option<Vec<Complex64>> {
        self.inner.symbol().map(<[Complex64]>::to_vec)
    }

    #[getter]
    fn truncation_residual(&self) -> f64 {
        self.inner.truncation_residual()
    }
}

/// Quadratic translation-invariant lattice Hamiltonian.
#[pyclass(
    name = "Hamiltonian",
    module = "bandlattice_py",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
pub struct PyHamiltonian {
    inner: QuadraticLatticeHamiltonian,
}

#[pymethods]
impl PyHamiltonian {
    #[staticmethod]
    fn klein_gordon(mass: f64, lattice: &PyLattice) -> PyResult<Self> {
        Ok(Self {
            inner: QuadraticLatticeHamiltonian::bandlimited_klein_gordon(mass, &lattice.inner)
                .map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn harmonic_chain(particle_mass: f64, spring: f64, lattice: &PyLattice) -> PyResult<Self> {
        let inner =
            QuadraticLatticeHamiltonian::harmonic_chain(particle_mass, spring, &lattice.inner)
                .map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn random(lattice: &PyLattice, half_width: usize, seed: u64) -> Self {
        Self {
            inner: random_quadratic_hamiltonian(&lattice.inner, half_width, &mut seeded(seed)),
        }
    }

    fn energy(&self, q: &PyField, p: &PyField) -> PyResult<f64> {
        self.inner.energy(&q.real()?, &p.real()?).map_err(to_py)
    }

    /// `(n, k, omega^2)` for every lattice momentum.
    fn dispersion(&self) -> PyResult<Vec<(i64, f64, f64)>> {
        let curve = self.inner.dispersion().map_err(to_py)?;
        Ok(curve.points.iter().map(|p| (p.n, p.k, p.omega2)).collect())
    }

    /// Symmetric `2N x 2N` matrix `A` with `energy = xi^T A xi`.
    fn phase_space_matrix(&self) -> Vec<Vec<f64>> {
        let form = self.inner.to_phase_space_form();
        let m = form.matrix();
        m.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    fn lift_energy_continuum(
        &self,
        q: &PyField,
        p: &PyField,
        quadrature_points: usize,
    ) -> PyResult<f64> {
        self.inner
            .lift_energy_continuum(&q.real()?, &p.real()?, quadrature_points)
            .map_err(to_py)
    }
}

/// Bandlimited total momentum `P = -p^T D q`.
#[pyclass(name = "TotalMomentum", module = "bandlattice_py", frozen)]
pub struct PyTotalMomentum {
    inner: bandlattice::TotalMomentum,
}

#[pymethods]
impl PyTotalMomentum {
    #[new]
    fn new(lattice: &PyLattice) -> PyResult<Self> {
        Ok(Self {
            inner: bandlattice::TotalMomentum::new(&lattice.inner).map_err(to_py)?,
        })
    }

    fn value(&self, q: &PyField, p: &PyField) -> PyResult<f64> {
        self.inner.value(&q.real()?, &p.real()?).map_err(to_py)
    }

    /// Largest entry of the quadratic kernel of `i[H, P]`.
    fn commutator_residual(&self, hamiltonian: &PyHamiltonian) -> PyResult<f64> {
        let c = symmetry::quadratic_commutator(
            &hamiltonian.inner.to_phase_space_form(),
            self.inner.form(),
        )
        .map_err(to_py)?;
        Ok(c.max_abs())
    }

    /// Normalized `[H + lambda*sum q^3, P]` in a truncated Fock space.
    #[pyo3(signature = (hamiltonian, cubic = 0.0, cutoff = 5))]
    fn fock_residual(
        &self,
        hamiltonian: &PyHamiltonian,
        cubic: f64,
        cutoff: usize,
    ) -> PyResult<f64> {
        symmetry::fock_oracle_commutator(&hamiltonian.inner, cubic, &self.inner, cutoff)
            .map_err(to_py)
    }
}

/// Recorded time series of a classical flow.
#[pyclass(name = "Trajectory", module = "bandlattice_py", frozen, get_all)]
pub struct PyTrajectory {
    t: Vec<f64>,
    energy: Vec<f64>,
    momentum: Vec<f64>,
    final_q: Vec<f64>,
    final_p: Vec<f64>,
}

#[pymethods]
impl PyTrajectory {
    fn momentum_drift(&self) -> f64 {
        self.momentum
            .iter()
            .map(|m| (m - self.momentum[0]).abs())
            .fold(0.0, f64::max)
    }

    fn energy_drift(&self) -> f64 {
        self.energy
            .iter()
            .map(|e| (e - self.energy[0]).abs())
            .fold(0.0, f64::max)
    }
}

#[pyfunction]
fn sample(f: &PyTestFunction, lattice: &PyLattice) -> PyResult<PyField> {
    Ok(PyField {
        inner: sampling::sample(&f.inner, &lattice.inner).map_err(to_py)?,
    })
}

/// Random bandlimited `(q, p)`, each scaled to peak `amplitude`.
#[pyfunction]
#[pyo3(signature = (lattice, amplitude = 0.5, seed = 0))]
fn random_state(lattice: &PyLattice, amplitude: f64, seed: u64) -> PyResult<(PyField, PyField)> {
    let (q, p) =
        random_phase_space_state(&lattice.inner, amplitude, &mut seeded(seed)).map_err(to_py)?;
    Ok((PyField::from_real(q), PyField::from_real(p)))
}

#[pyfunction]
#[pyo3(signature = (hamiltonian, q, p, t_final, steps, cubic = 0.0, record_every = 1))]
fn classical_flow(
    hamiltonian: &PyHamiltonian,
    q: &PyField,
    p: &PyField,
    t_final: f64,
    steps: usize,
    cubic: f64,
    record_every: usize,
) -> PyResult<PyTrajectory> {
    if record_every == 0 {
        return Err(PyValueError::new_err("record_every must be positive"));
    }
    let config = FlowConfig::new(t_final, steps)
        .with_cubic(cubic)
        .record_every(record_every);
    let traj = symmetry::classical_flow(&hamiltonian.inner, &q.real()?, &p.real()?, &config)
        .map_err(to_py)?;
    Ok(PyTrajectory {
        t: traj.samples.iter().map(|s| s.t).collect(),
        energy: traj.samples.iter().map(|s| s.energy).collect(),
        momentum: traj.samples.iter().map(|s| s.momentum).collect(),
        final_q: traj.final_q,
        final_p: traj.final_p,
    })
}

#[pyfunction]
fn cubic_witness(q: &PyField) -> PyResult<f64> {
    symmetry::cubic_witness(&q.real()?).map_err(to_py)
}

#[pyfunction]
fn partial_sum_s(m: i64, cutoff: u64) -> PyResult<f64> {
    operators::partial_sum_s(m, cutoff).map_err(to_py)
}

#[pyfunction]
fn basel_partial_sum(cutoff: u64) -> f64 {
    operators::basel_partial_sum(cutoff)
}

#[pymodule]
fn bandlattice_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLattice>()?;
    m.add_class::<PyTestFunction>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyKernel>()?;
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PyTotalMomentum>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(random_state, m)?)?;
    m.add_function(wrap_pyfunction!(classical_flow, m)?)?;
    m.add_function(wrap_pyfunction!(cubic_witness, m)?)?;
    m.add_function(wrap_pyfunction!(partial_sum_s, m)?)?;
    m.add_function(wrap_pyfunction!(basel_partial_sum, m)?)?;
    Ok(())
}

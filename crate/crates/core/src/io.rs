//! CSV and JSON file formats.
//!
//! * Sampled fields: `j,x,value_re,value_im` plus a JSON sidecar
//!   `{dx, b, n, boundary}` next to the CSV (same stem, `.json`).
//! * Kernels: `m,coefficient` (Toeplitz) or `n,k,symbol_re,symbol_im`
//!   (periodic).
//! * Dispersion: `n,k,omega2_measured,omega2_expected,abs_err`.
//! * Trajectories: `t,energy,momentum`, snapshots as `j,x,q,p`.
//! * Hamiltonian specs: `{type, params, dx, n, boundary}`.
//!
//! Floats are written in shortest round-trip exponent form.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Amplitude, SampledField};
use crate::hamiltonian::{DispersionCurve, QuadraticLatticeHamiltonian};
use crate::lattice::{Boundary, Lattice};
use crate::operators::BanddedKernel;
use crate::symmetry::{Snapshot, Trajectory};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

/// JSON sidecar describing the lattice of a field CSV.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSidecar {
    pub dx: f64,
    pub b: f64,
    pub n: usize,
    pub boundary: Boundary,
}

impl From<&Lattice> for LatticeSidecar {
    fn from(l: &Lattice) -> Self {
        Self {
            dx: l.spacing(),
            b: l.offset(),
            n: l.size(),
            boundary: l.boundary(),
        }
    }
}

impl LatticeSidecar {
    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.dx, self.b, self.n, self.boundary)
    }
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(
        path,
    )?)))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Write `field` as CSV at `path` and its lattice as the JSON sidecar.
pub fn write_field<T: Amplitude>(path: &Path, field: &SampledField<T>) -> Result<()> {
    let lattice = field.lattice();
    let mut w = csv_writer(path)?;
    w.write_record(["j", "x", "value_re", "value_im"])?;
    for (j, v) in field.values().iter().enumerate() {
        let c = v.to_complex();
        w.write_record([
            j.to_string(),
            fmt_f64(lattice.point(j as isize)),
            fmt_f64(c.re),
            fmt_f64(c.im),
        ])?;
    }
    w.flush()?;
    write_json(&sidecar_path(path), &LatticeSidecar::from(lattice))
}

#[derive(Deserialize)]
struct FieldRow {
    j: usize,
    #[allow(dead_code)]
    x: f64,
    value_re: f64,
    value_im: f64,
}

/// Read a field written by [`write_field`].
pub fn read_field(path: &Path) -> Result<SampledField<Complex64>> {
    let sidecar: LatticeSidecar = serde_json::from_reader(File::open(sidecar_path(path))?)?;
    let lattice = sidecar.lattice()?;
    let mut values = vec![Complex64::new(0.0, 0.0); lattice.size()];
    let mut seen = vec![false; lattice.size()];
    for row in csv::Reader::from_path(path)?.deserialize() {
        let row: FieldRow = row?;
        if row.j >= values.len() || seen[row.j] {
            return Err(Error::LatticeMismatch(format!(
                "bad or repeated site index {}",
                row.j
            )));
        }
        seen[row.j] = true;
        values[row.j] = Complex64::new(row.value_re, row.value_im);
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::LatticeMismatch("missing site rows".into()));
    }
    SampledField::new(lattice, values)
}

/// Kernel dump for golden-file comparisons.
pub fn write_kernel(path: &Path, kernel: &BanddedKernel) -> Result<()> {
    let mut w = csv_writer(path)?;
    if let Some(t) = kernel.toeplitz_coefficients() {
        w.write_record(["m", "coefficient"])?;
        let half = (t.len() / 2) as i64;
        for (i, c) in t.iter().enumerate() {
            w.write_record([(i as i64 - half).to_string(), fmt_f64(*c)])?;
        }
    } else if let (Some(s), Some(ks)) = (kernel.symbol(), kernel.momenta()) {
        w.write_record(["n", "k", "symbol_re", "symbol_im"])?;
        let h = (s.len() as i64 - 1) / 2;
        for (i, (sigma, k)) in s.iter().zip(ks).enumerate() {
            w.write_record([
                (i as i64 - h).to_string(),
                fmt_f64(k),
                fmt_f64(sigma.re),
                fmt_f64(sigma.im),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Dispersion table with the expected curve and pointwise error.
pub fn write_dispersion(
    path: &Path,
    curve: &DispersionCurve,
    expected: impl Fn(f64) -> f64,
) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["n", "k", "omega2_measured", "omega2_expected", "abs_err"])?;
    for p in &curve.points {
        let e = expected(p.k);
        w.write_record([
            p.n.to_string(),
            fmt_f64(p.k),
            fmt_f64(p.omega2),
            fmt_f64(e),
            fmt_f64((p.omega2 - e).abs()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `t,energy,momentum` for every recorded sample.
pub fn write_trajectory(path: &Path, trajectory: &Trajectory) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["t", "energy", "momentum"])?;
    for s in &trajectory.samples {
        w.write_record([fmt_f64(s.t), fmt_f64(s.energy), fmt_f64(s.momentum)])?;
    }
    w.flush()?;
    Ok(())
}

/// One snapshot as `j,x,q,p`.
pub fn write_snapshot(path: &Path, lattice: &Lattice, snapshot: &Snapshot) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["j", "x", "q", "p"])?;
    for (j, (q, p)) in snapshot.q.iter().zip(&snapshot.p).enumerate() {
        w.write_record([
            j.to_string(),
            fmt_f64(lattice.point(j as isize)),
            fmt_f64(*q),
            fmt_f64(*p),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Generic CSV table with preformatted cells.
pub fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_json(path, value)
}

/// Model parameters of a [`HamiltonianSpec`]; unused fields may be omitted.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particle_mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spring: Option<f64>,
}

/// Hamiltonian description ingested by the CLI:
/// `{"type": "klein_gordon" | "harmonic_chain", "params": {...}, "dx", "n", "boundary"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub params: HamiltonianParams,
    pub dx: f64,
    pub n: usize,
    pub boundary: Boundary,
}

impl HamiltonianSpec {
    pub fn from_path(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(File::open(path)?)?)
    }

    pub fn build(&self) -> Result<QuadraticLatticeHamiltonian> {
        let lattice = Lattice::new(self.dx, 0.0, self.n, self.boundary)?;
        match self.kind.as_str() {
            "klein_gordon" | "kg" => QuadraticLatticeHamiltonian::bandlimited_klein_gordon(
                self.params.mass.unwrap_or(0.0),
                &lattice,
            ),
            "harmonic_chain" | "chain" => QuadraticLatticeHamiltonian::harmonic_chain(
                self.params.particle_mass.unwrap_or(1.0),
                self.params.spring.unwrap_or(1.0),
                &lattice,
            ),
            other => Err(Error::InvalidParameter(format!(
                "unknown Hamiltonian type `{other}`"
            ))),
        }
    }
}

use std::path::{Path, PathBuf};

use bandlattice::Boundary;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const OUT_ENV: &str = "BANDLATTICE_OUT";
const DEFAULT_OUT: &str = "bandlattice-out";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Reconstruct,
    Dispersion,
    Conserve,
    Translate,
    KernelSweep,
}

/// Settings that may come from flags or a JSON config file. Unset fields
/// fall through to the next source.
#[derive(Clone, Debug, Default, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Lattice spacing Δx
    #[arg(long, global = true)]
    pub dx: Option<f64>,
    /// Lattice offset b in [0, Δx)
    #[arg(long, global = true)]
    pub b: Option<f64>,
    /// Number of lattice sites
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// `periodic` or `truncated`
    #[arg(long, global = true)]
    pub boundary: Option<Boundary>,
    /// Klein–Gordon mass m
    #[arg(long, global = true)]
    pub mass: Option<f64>,
    /// Harmonic-chain particle mass M
    #[arg(long, global = true)]
    pub particle_mass: Option<f64>,
    /// Harmonic-chain spring constant k_s
    #[arg(long, global = true)]
    pub spring: Option<f64>,
    /// Cubic coupling λ
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Translation distance (default Δx/2)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized states and Hamiltonians
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Sites of the periodic lattice used for time evolution
    #[arg(long, global = true)]
    pub flow_n: Option<usize>,
    /// Time steps of each flow
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Final time of each flow
    #[arg(long, global = true)]
    pub t_final: Option<f64>,
    /// Recorded flow samples between trajectory snapshots
    #[arg(long, global = true)]
    pub snapshot_every: Option<usize>,
    /// Sites of the Fock-space oracle
    #[arg(long, global = true)]
    pub fock_sites: Option<usize>,
    /// Per-site excitation cutoff of the Fock-space oracle
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,
    /// Number of random quadratic Hamiltonians checked by `conserve`
    #[arg(long, global = true)]
    pub ensemble: Option<usize>,
    /// Sampling density multiplier for `reconstruct`
    #[arg(long, global = true)]
    pub oversample: Option<usize>,
    /// Fourier terms in the random test function
    #[arg(long, global = true)]
    pub terms: Option<usize>,
    /// Amplitude of the random test function
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub amplitude: Option<f64>,
    /// Largest Toeplitz half-width in `kernel-sweep`
    #[arg(long, global = true)]
    pub m_max: Option<usize>,
    /// Largest partial-sum length in `kernel-sweep`
    #[arg(long, global = true)]
    pub l_max: Option<u64>,
    /// Extra Hamiltonian spec file (JSON) for `dispersion` and `conserve`
    #[arg(long, global = true)]
    pub hamiltonian: Option<PathBuf>,
}

macro_rules! overlay {
    ($hi:ident, $lo:ident, $($field:ident),*) => {
        Settings { $($field: $hi.$field.or($lo.$field)),* }
    };
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))
    }

    /// Fields of `self` where set, otherwise those of `lower`.
    pub fn over(self, lower: Settings) -> Settings {
        overlay!(
            self,
            lower,
            dx,
            b,
            n,
            boundary,
            mass,
            particle_mass,
            spring,
            lambda,
            a,
            out,
            seed,
            flow_n,
            steps,
            t_final,
            snapshot_every,
            fock_sites,
            cutoff,
            ensemble,
            oversample,
            terms,
            amplitude,
            m_max,
            l_max,
            hamiltonian
        )
    }
}

/// Fully resolved and validated run parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub dx: f64,
    pub b: f64,
    pub n: usize,
    pub boundary: Boundary,
    pub mass: f64,
    pub particle_mass: f64,
    pub spring: f64,
    pub lambda: f64,
    pub a: f64,
    pub seed: u64,
    pub flow_n: usize,
    pub steps: usize,
    pub t_final: f64,
    pub snapshot_every: usize,
    pub fock_sites: usize,
    pub cutoff: usize,
    pub ensemble: usize,
    pub oversample: usize,
    pub terms: usize,
    pub amplitude: f64,
    pub m_max: usize,
    pub l_max: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<PathBuf>,
    #[serde(skip)]
    pub out: PathBuf,
}

impl RunConfig {
    /// Flags take precedence over the config file, which takes precedence
    /// over the defaults. The output directory falls back to `BANDLATTICE_OUT`.
    pub fn resolve(
        command: Command,
        flags: Settings,
        config_file: Option<&Path>,
    ) -> Result<Self, CliError> {
        let file = match config_file {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        let s = flags.over(file);
        let dx = s.dx.unwrap_or(1.0);
        let out = s
            .out
            .or_else(|| {
                std::env::var_os(OUT_ENV)
                    .filter(|v| !v.is_empty())
                    .map(PathBuf::from)
            })
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        let config = RunConfig {
            command,
            dx,
            b: s.b.unwrap_or(0.0),
            n: s.n.unwrap_or(257),
            boundary: s.boundary.unwrap_or(Boundary::Periodic),
            mass: s.mass.unwrap_or(1.0),
            particle_mass: s.particle_mass.unwrap_or(1.0),
            spring: s.spring.unwrap_or(1.0),
            lambda: s.lambda.unwrap_or(0.1),
            a: s.a.unwrap_or(0.5 * dx),
            seed: s.seed.unwrap_or(0),
            flow_n: s.flow_n.unwrap_or(65),
            steps: s.steps.unwrap_or(100_000),
            t_final: s.t_final.unwrap_or(10.0),
            snapshot_every: s.snapshot_every.unwrap_or(100),
            fock_sites: s.fock_sites.unwrap_or(3),
            cutoff: s.cutoff.unwrap_or(5),
            ensemble: s.ensemble.unwrap_or(50),
            oversample: s.oversample.unwrap_or(1),
            terms: s.terms.unwrap_or(5),
            amplitude: s.amplitude.unwrap_or(1.0),
            m_max: s.m_max.unwrap_or(100_000),
            l_max: s.l_max.unwrap_or(1_000_000),
            hamiltonian: s.hamiltonian,
            out,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if !(self.dx.is_finite() && self.dx > 0.0) {
            return bad(format!("dx must be positive, got {}", self.dx));
        }
        if !(self.b.is_finite() && (0.0..self.dx).contains(&self.b)) {
            return bad(format!("b must lie in [0, dx), got {}", self.b));
        }
        if self.n < 3 {
            return bad(format!("n must be at least 3, got {}", self.n));
        }
        let needs_odd = match self.command {
            Command::Reconstruct => false,
            Command::Translate | Command::Dispersion | Command::Conserve => {
                self.boundary == Boundary::Periodic
            }
            Command::KernelSweep => true,
        };
        if needs_odd && self.n.is_multiple_of(2) {
            return bad(format!(
                "`{}` needs an odd n on a periodic lattice, got {}",
                self.command_name(),
                self.n
            ));
        }
        if self.command == Command::Dispersion && self.boundary != Boundary::Periodic {
            return bad("dispersion needs a periodic lattice".into());
        }
        if !(self.mass.is_finite() && self.mass >= 0.0) {
            return bad(format!("mass must be non-negative, got {}", self.mass));
        }
        if !(self.particle_mass.is_finite() && self.particle_mass > 0.0) {
            return bad(format!(
                "particle-mass must be positive, got {}",
                self.particle_mass
            ));
        }
        if !(self.spring.is_finite() && self.spring > 0.0) {
            return bad(format!("spring must be positive, got {}", self.spring));
        }
        if !self.lambda.is_finite() || !self.a.is_finite() || !self.amplitude.is_finite() {
            return bad("lambda, a and amplitude must be finite".into());
        }
        if self.flow_n < 3 || self.flow_n.is_multiple_of(2) {
            return bad(format!(
                "flow-n must be odd and at least 3, got {}",
                self.flow_n
            ));
        }
        if self.steps == 0 || self.snapshot_every == 0 || self.oversample == 0 || self.terms == 0 {
            return bad("steps, snapshot-every, oversample and terms must be positive".into());
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return bad(format!("t-final must be positive, got {}", self.t_final));
        }
        if self.m_max < 10 || self.l_max < 10 {
            return bad("m-max and l-max must be at least 10".into());
        }
        Ok(())
    }

    pub fn command_name(&self) -> &'static str {
        match self.command {
            Command::Reconstruct => "reconstruct",
            Command::Dispersion => "dispersion",
            Command::Conserve => "conserve",
            Command::Translate => "translate",
            Command::KernelSweep => "kernel-sweep",
        }
    }
}

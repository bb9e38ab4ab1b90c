use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    #[error("wavenumber {k} is not strictly inside the bandlimit {bandlimit}")]
    OutsideBand { k: f64, bandlimit: f64 },

    #[error(
        "wavenumber {k} is not a lattice momentum of the periodic lattice (mode index {index})"
    )]
    NotPeriodic { k: f64, index: f64 },

    #[error("offset {offset} outside [0, {spacing})")]
    InvalidOffset { offset: f64, spacing: f64 },

    #[error("periodic operators require an odd lattice size, got {0}")]
    EvenPeriodicSize(usize),

    #[error("kernel mismatch: {0}")]
    KernelMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadratic form is indefinite: omega^2 = {omega2} at k = {k}")]
    Indefinite { k: f64, omega2: f64 },

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

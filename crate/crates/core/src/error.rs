use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation dimension {dim} is too small (need at least {min})")]
    DimensionTooSmall { dim: usize, min: usize },

    #[error("state amplitudes have zero norm")]
    ZeroNorm,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("integration step must be positive, got {0}")]
    InvalidStep(f64),

    #[error("dimensionless time must be non-negative and finite, got {0}")]
    InvalidTime(f64),

    #[error("time samples must be ascending and non-negative")]
    UnsortedSamples,

    #[error("invalid populations: {0}")]
    InvalidPopulations(String),

    #[error("invalid state parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid does not cover the required region: {0}")]
    InsufficientCoverage(String),

    #[error("g2 is undefined at the vacuum (mean photon number {mean_n:e})")]
    UndefinedAtVacuum { mean_n: f64 },

    #[error("atom index {index} out of range for {n_atoms} atom(s)")]
    InvalidAtom { index: usize, n_atoms: usize },

    #[error("post-selection on (e, e) has zero probability for these parameters")]
    PostSelectionFailed,

    #[error("configuration errors:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 configuration, 2 I/O, 3 physics-domain failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse(_) => 1,
            Error::Io { .. } => 2,
            _ => 3,
        }
    }
}

use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} did not converge within {iterations} iterations")]
    ConvergenceFailure { what: &'static str, iterations: usize },

    #[error("zero gradient: normalization direction undefined")]
    ZeroGradient,

    #[error("degenerate smoothness constants: L0 = L1 = 0")]
    DegenerateSmoothness,

    #[error("no finite (L0, L1) envelope covers the sampled pairs")]
    EnvelopeInfeasible,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("label {label:?} at line {line} is outside {{-1, +1, 0}}")]
    LabelDomain { line: usize, label: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("divergence detected at iteration {iteration}: {reason}")]
    Divergence { iteration: usize, reason: String },

    #[error("problem fingerprint mismatch: {first} vs {other} ({path})")]
    FingerprintMismatch { first: String, other: String, path: PathBuf },

    #[error("checksum mismatch: expected {expected}, got {actual}")]
    Checksum { expected: String, actual: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) | Error::DegenerateSmoothness => 2,
            Error::Divergence { .. } => 3,
            Error::Io { .. } | Error::Checksum { .. } | Error::FingerprintMismatch { .. } => 4,
            Error::Parse { .. } | Error::LabelDomain { .. } => 5,
            _ => 1,
        }
    }
}

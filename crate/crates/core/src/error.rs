use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degenerate distance scale: all points are identical (A = 0)")]
    DegenerateScale,

    #[error("degenerate affinity: zero degree at point(s) {indices:?}")]
    DegenerateAffinity { indices: Vec<usize> },

    #[error("numerical failure: {message} (residual {residual:e})")]
    Numerical { message: String, residual: f64 },

    #[error("cannot evaluate: {0}")]
    CannotEvaluate(String),

    #[error("model format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parameter(_) | Error::Json(_) => 1,
            Error::Parse { .. }
            | Error::InvalidDataset(_)
            | Error::CannotEvaluate(_)
            | Error::Format(_)
            | Error::Io(_)
            | Error::DimensionMismatch { .. } => 2,
            Error::DegenerateScale | Error::DegenerateAffinity { .. } | Error::Numerical { .. } => 3,
        }
    }

    /// True for failures that a sweep records as a failed grid point.
    pub fn is_numerical(&self) -> bool {
        self.exit_code() == 3
    }
}

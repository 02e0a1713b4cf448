use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the numeric, decomposition and data-loading routines.
#[derive(Debug, Error)]
pub enum PcaError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degenerate vector: norm {norm:e} is not above tolerance {tol:e}")]
    DegenerateVector { norm: f64, tol: f64 },

    #[error("first two samples are identical; supply a distinct second time-step")]
    DegenerateInit,

    #[error("at least {required} samples are required, got {actual}")]
    InsufficientData { required: usize, actual: usize },

    #[error(
        "Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("every Gram eigenvalue is below the rank tolerance")]
    RankZero,

    #[error("data has zero total variance")]
    ZeroVariance,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("component index {index} out of range (space has {count} components)")]
    ComponentOutOfRange { index: usize, count: usize },

    #[error("no input files matched {0}")]
    EmptyDataset(String),

    #[error("malformed file {path}: {reason}")]
    MalformedFile { path: PathBuf, reason: String },

    #[error("frame {path} has shape {actual:?}, expected {expected:?}")]
    MixedDimensions {
        path: PathBuf,
        expected: Vec<usize>,
        actual: Vec<usize>,
    },

    #[error("unknown generator {0:?}")]
    UnknownGenerator(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, PcaError>;

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(PcaError::DimensionMismatch { expected, actual })
    }
}

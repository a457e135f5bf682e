use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("entry ({row}, {col}) out of range for a {n_rows}x{n_cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },

    #[error("non-finite value {value} at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize, value: f64 },

    #[error("malformed compressed-row structure: {0}")]
    MalformedCsr(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cluster {0} is empty")]
    EmptyCluster(usize),

    #[error("clustering has no prototype features; least-squares interpolation needs leader-follower or Renyi prototypes")]
    CentroidPrototypes,

    #[error("{solver} broke down at iteration {iteration}: {reason}")]
    Breakdown {
        solver: &'static str,
        iteration: usize,
        reason: String,
    },

    #[error("{solver}: non-finite value in the recurrence at iteration {iteration}")]
    NonFiniteRecurrence {
        solver: &'static str,
        iteration: usize,
    },

    #[error("Cholesky factorization of the level-{level} Galerkin operator ({dim}x{dim}) failed; the operator is numerically indefinite (try a larger beta or a smaller coarse size)")]
    CholeskyFailed { level: usize, dim: usize },

    #[error("dense path needs {dim} features but the cap is {cap} (raise it with FEATMG_DENSE_CAP)")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("coarse solve on level {level} failed: {source}")]
    CoarseSolve {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("Matrix Market {path}:{line}: {message}")]
    MatrixMarket {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config: {field}: {message}")]
    Config { field: String, message: String },

    #[error("{dataset}/{method}: {source}")]
    Experiment {
        dataset: String,
        method: String,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            actual,
        });
    }
    Ok(())
}

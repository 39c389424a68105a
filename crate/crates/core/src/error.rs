use std::path::PathBuf;

use nalgebra::DVector;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("symmetric eigendecomposition did not converge")]
    EigenFailure,

    /// The inner solver hit its iteration cap. Carries the best iterate seen.
    #[error(
        "inner solver stopped after {iters} iterations with fixed-point residual {residual:e}"
    )]
    NotConverged {
        best: DVector<f64>,
        residual: f64,
        iters: usize,
    },

    #[error("subproblem is unbounded below: {0}")]
    Unbounded(String),

    /// The composite objective left the finite range during the outer loop.
    #[error(
        "objective diverged at iteration {iteration}: {detail}; \
         try a smaller lambda3 or a larger lambda4"
    )]
    Divergence { iteration: usize, detail: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
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

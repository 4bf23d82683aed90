use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("SNR is undefined when a + b = 0")]
    UndefinedSnr,

    #[error("parameters out of range: {0}")]
    OutOfRange(String),

    #[error("no signal: a = b, the test has no orientation")]
    NoSignal,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("column {0} has zero variance")]
    ZeroVariance(usize),

    #[error("degenerate classes: equal means and zero pooled variance")]
    DegenerateClasses,

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("graph is empty")]
    EmptyGraph,

    #[error("labels contain a single community")]
    SingleCommunity,

    #[error("{path}:{line}: {reason}")]
    Parse { path: PathBuf, line: usize, reason: String },

    #[error("malformed sweep spec: {0}")]
    Spec(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}

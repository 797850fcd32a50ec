use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {message}")]
    Ingest { path: PathBuf, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("covariance is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NonPsd { eigenvalue: f64 },

    #[error("out of range: {0}")]
    Range(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("degenerate table: {0}")]
    DegenerateTable(String),

    #[error("operator contract violated: {0}")]
    Contract(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Coarse error class, used by front ends to pick exit and status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Io,
    Validation,
    Numeric,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Ingest { .. } | Error::Io(_) => ErrorKind::Io,
            Error::Format(_)
            | Error::Validation(_)
            | Error::InsufficientSamples { .. }
            | Error::Range(_)
            | Error::Contract(_) => ErrorKind::Validation,
            Error::NonPsd { .. }
            | Error::DegenerateSample(_)
            | Error::DegenerateTable(_)
            | Error::Evaluation(_) => ErrorKind::Numeric,
        }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}

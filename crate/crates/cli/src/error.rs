use std::path::PathBuf;

use evalkit::ErrorKind;
use evalkit_turing::ServiceError;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] evalkit::Error),

    #[error(transparent)]
    Service(#[from] ServiceError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn kind(&self) -> &'static str {
        let core = |k: ErrorKind| match k {
            ErrorKind::Io => "io",
            ErrorKind::Validation => "validation",
            ErrorKind::Numeric => "numeric",
        };
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Core(e) => core(e.kind()),
            CliError::Service(ServiceError::Core(e)) => core(e.kind()),
            CliError::Service(ServiceError::Log(_)) => "io",
            CliError::Service(_) => "validation",
        }
    }

    /// 2 usage, 3 I/O, 4 validation, 5 numeric.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "usage" => 2,
            "io" => 3,
            "numeric" => 5,
            _ => 4,
        }
    }

    /// One line of JSON for standard error.
    pub fn to_json_line(&self) -> String {
        json!({ "error": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() }).to_string()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

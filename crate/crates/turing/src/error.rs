use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{0}")]
    Validation(String),

    #[error("{0} not found")]
    NotFound(String),

    #[error("{0}")]
    Conflict(String),

    #[error("out-of-order judgment: expected index {expected}, got {got}")]
    Sequence { expected: usize, got: usize },

    #[error("{0}")]
    State(String),

    #[error("event log: {0}")]
    Log(String),

    #[error(transparent)]
    Core(#[from] evalkit::Error),
}

impl ServiceError {
    pub fn kind(&self) -> &'static str {
        match self {
            ServiceError::Validation(_) => "validation",
            ServiceError::NotFound(_) => "not_found",
            ServiceError::Conflict(_) => "conflict",
            ServiceError::Sequence { .. } => "sequence",
            ServiceError::State(_) => "state",
            ServiceError::Log(_) => "log",
            ServiceError::Core(e) => match e.kind() {
                evalkit::ErrorKind::Io => "io",
                evalkit::ErrorKind::Validation => "validation",
                evalkit::ErrorKind::Numeric => "numeric",
            },
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::Validation(_) => StatusCode::BAD_REQUEST,
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Conflict(_) | ServiceError::Sequence { .. } | ServiceError::State(_) => StatusCode::CONFLICT,
            ServiceError::Log(_) => StatusCode::INTERNAL_SERVER_ERROR,
            ServiceError::Core(e) => match e.kind() {
                evalkit::ErrorKind::Io => StatusCode::UNPROCESSABLE_ENTITY,
                _ => StatusCode::BAD_REQUEST,
            },
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let body = json!({ "error": self.kind(), "message": self.to_string() });
        (self.status(), Json(body)).into_response()
    }
}

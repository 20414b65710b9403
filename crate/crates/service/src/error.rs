use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use burt_core::dialogue::DialogueError;
use burt_core::report::ReportError;
use serde::Serialize;
use thiserror::Error;

use crate::config::ConfigError;

/// Failures outside a request: startup, CLI commands.
#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("model {path}: {message}")]
    Model { path: String, message: String },
    #[error("lexicon: {0}")]
    Lexicon(String),
    #[error("script {path}: {message}")]
    Script { path: String, message: String },
    #[error("message {index} ({kind}): {source}")]
    Replay {
        index: usize,
        kind: &'static str,
        source: DialogueError,
    },
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("cannot bind {addr}: {message}")]
    Bind { addr: String, message: String },
}

impl ServiceError {
    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        ServiceError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
}

/// Request failure rendered as `{code, message}` JSON.
#[derive(Debug, Clone)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                code,
                message: message.into(),
            },
        }
    }

    pub fn unknown_session(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown_session", format!("no session {id}"))
    }

    pub fn unknown_app(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown_app", format!("no app {id}"))
    }

    pub fn malformed(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "malformed_request", message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<DialogueError> for ApiError {
    fn from(e: DialogueError) -> Self {
        let (status, code) = match &e {
            DialogueError::IllegalMessage { .. } => (StatusCode::CONFLICT, "illegal_message"),
            DialogueError::InvalidPayload(_) => (StatusCode::BAD_REQUEST, "invalid_payload"),
            DialogueError::NothingToReport => (StatusCode::CONFLICT, "nothing_to_report"),
            DialogueError::NothingToDelete => (StatusCode::CONFLICT, "nothing_to_delete"),
            DialogueError::Desynchronized(_) => (StatusCode::CONFLICT, "desynchronized"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<ReportError> for ApiError {
    fn from(e: ReportError) -> Self {
        match &e {
            ReportError::NothingToReport => ApiError::new(StatusCode::CONFLICT, "nothing_to_report", e.to_string()),
            ReportError::UnknownFormat(_) => ApiError::new(StatusCode::BAD_REQUEST, "unknown_format", e.to_string()),
            _ => ApiError::internal(e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

//! Uniform error body for every non-2xx response.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use mazemate_core::compress::{CompressError, PipelineError};
use mazemate_core::scaffold::HintError;
use mazemate_core::solver::SolveError;
use mazemate_core::{MazeError, ProgramError, UnsolvableReason};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCode {
    Syntax,
    Schema,
    Unsolvable,
    StaleSession,
    NotFound,
    Limit,
    LlmUnavailable,
    /// A compressor self-check failed. Signals a bug, never bad input.
    Internal,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Syntax => "SYNTAX",
            ErrorCode::Schema => "SCHEMA",
            ErrorCode::Unsolvable => "UNSOLVABLE",
            ErrorCode::StaleSession => "STALE_SESSION",
            ErrorCode::NotFound => "NOT_FOUND",
            ErrorCode::Limit => "LIMIT",
            ErrorCode::LlmUnavailable => "LLM_UNAVAILABLE",
            ErrorCode::Internal => "INTERNAL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub status: u16,
    pub code: ErrorCode,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError {
            status: status.as_u16(),
            code,
            message: message.into(),
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, ErrorCode::NotFound, format!("no {what} with id {id:?}"))
            .with_detail(json!({ "kind": what, "id": id }))
    }

    pub fn syntax(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, ErrorCode::Syntax, message)
    }

    pub fn unsolvable(reason: UnsolvableReason) -> Self {
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            ErrorCode::Unsolvable,
            format!("maze is unsolvable: {reason}"),
        )
        .with_detail(json!({ "reason": reason }))
    }

    pub fn status_code(&self) -> StatusCode {
        StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR)
    }

    /// CLI exit code: 1 for domain failures, 2 for bad input.
    pub fn exit_code(&self) -> u8 {
        match self.code {
            ErrorCode::Syntax | ErrorCode::Schema | ErrorCode::NotFound => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}: {}", self.code, self.message)
    }
}

impl std::error::Error for ApiError {}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status_code(), Json(self)).into_response()
    }
}

impl From<MazeError> for ApiError {
    fn from(e: MazeError) -> Self {
        match &e {
            MazeError::Syntax { line, column, .. } => ApiError::new(StatusCode::BAD_REQUEST, ErrorCode::Syntax, e.to_string())
                .with_detail(json!({ "line": line, "column": column })),
            MazeError::Schema { field, at, .. } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, ErrorCode::Schema, e.to_string())
                    .with_detail(json!({ "field": field, "at": at }))
            }
        }
    }
}

impl From<ProgramError> for ApiError {
    fn from(e: ProgramError) -> Self {
        match &e {
            ProgramError::Syntax { line, column, .. } => ApiError::new(StatusCode::BAD_REQUEST, ErrorCode::Syntax, e.to_string())
                .with_detail(json!({ "line": line, "column": column })),
            ProgramError::Limit { line, column, .. } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, ErrorCode::Limit, e.to_string())
                    .with_detail(json!({ "line": line, "column": column }))
            }
        }
    }
}

impl From<SolveError> for ApiError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Timeout => ApiError::new(StatusCode::SERVICE_UNAVAILABLE, ErrorCode::Limit, e.to_string()),
            SolveError::Capacity(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, ErrorCode::Limit, e.to_string()),
        }
    }
}

impl From<CompressError> for ApiError {
    fn from(e: CompressError) -> Self {
        match e {
            CompressError::Solve(e) => e.into(),
            other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, ErrorCode::Internal, other.to_string()),
        }
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Unsolvable(r) => ApiError::unsolvable(r),
            PipelineError::Solve(e) => e.into(),
            PipelineError::Compress(e) => e.into(),
        }
    }
}

impl From<HintError> for ApiError {
    fn from(e: HintError) -> Self {
        match e {
            HintError::StaleSession { ref expected, ref found } => {
                ApiError::new(StatusCode::CONFLICT, ErrorCode::StaleSession, e.to_string())
                    .with_detail(json!({ "expected_hash": expected, "found_hash": found }))
            }
            HintError::Unsolvable(r) => ApiError::unsolvable(r),
            HintError::Solve(e) => e.into(),
            HintError::Compress(e) => e.into(),
        }
    }
}

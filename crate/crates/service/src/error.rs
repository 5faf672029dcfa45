//! The uniform error envelope: `{"code": ..., "message": ..., "detail": {...}}`.

use std::collections::BTreeMap;

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use combine_core::CoreError;
use combine_datasource::DataError;
use combine_grna::GrnaError;
use combine_tiles::TileError;
use serde::Serialize;
use serde_json::Value;

/// Machine-readable error codes. Each maps to one HTTP status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorCode {
    BadRequest,
    ValidationFailed,
    ParseError,
    UnsupportedVersion,
    InvalidEvent,
    UnknownAction,
    InvalidAnchor,
    ActionFailed,
    NotFound,
    RouteNotFound,
    MethodNotAllowed,
    NetworkNotFound,
    NetworkExists,
    PyramidNotFound,
    TileOutOfRange,
    RecordNotFound,
    LayoutTooLarge,
    InvalidSequence,
    UpstreamUnavailable,
    UpstreamInvalid,
    NotRecorded,
    Storage,
    Internal,
}

impl ErrorCode {
    pub fn status(self) -> StatusCode {
        use ErrorCode::*;
        match self {
            BadRequest | ValidationFailed | ParseError | UnsupportedVersion | InvalidEvent | UnknownAction
            | InvalidAnchor | InvalidSequence => StatusCode::BAD_REQUEST,
            ActionFailed => StatusCode::UNPROCESSABLE_ENTITY,
            NotFound | RouteNotFound | NetworkNotFound | PyramidNotFound | TileOutOfRange | RecordNotFound => {
                StatusCode::NOT_FOUND
            }
            MethodNotAllowed => StatusCode::METHOD_NOT_ALLOWED,
            NetworkExists => StatusCode::CONFLICT,
            LayoutTooLarge => StatusCode::PAYLOAD_TOO_LARGE,
            UpstreamUnavailable | UpstreamInvalid => StatusCode::BAD_GATEWAY,
            NotRecorded => StatusCode::SERVICE_UNAVAILABLE,
            Storage | Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn as_str(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub detail: BTreeMap<String, Value>,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError { code, message: message.into(), detail: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.detail.insert(key.to_string(), value.into());
        self
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::BadRequest, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::Internal, message)
    }

    pub fn storage(e: impl std::fmt::Display) -> Self {
        Self::new(ErrorCode::Storage, e.to_string())
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code.as_str(), self.message)
    }
}

impl std::error::Error for ApiError {}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        crate::api::json_response(self.code.status(), &self)
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let message = e.to_string();
        match e {
            CoreError::InvalidTable { row, column, .. } => {
                let mut err = ApiError::new(ErrorCode::ValidationFailed, message);
                if let Some(r) = row {
                    err = err.with("row", r);
                }
                if let Some(c) = column {
                    err = err.with("column", c);
                }
                err
            }
            CoreError::InvalidPosition { .. } => ApiError::new(ErrorCode::ValidationFailed, message),
            CoreError::Invalid(report) => ApiError::new(ErrorCode::ValidationFailed, "document failed validation")
                .with("violations", serde_json::to_value(&report.violations).unwrap_or_default()),
            CoreError::InvalidAnchor(_) => ApiError::new(ErrorCode::InvalidAnchor, message),
            CoreError::UnknownId(id) => ApiError::new(ErrorCode::NotFound, message).with("id", id),
            CoreError::UnknownAction(a) => ApiError::new(ErrorCode::UnknownAction, message).with("action", a),
            CoreError::ActionFailed { action, anchor, .. } => {
                ApiError::new(ErrorCode::ActionFailed, message).with("action", action).with("anchor", anchor)
            }
            CoreError::SequenceGap { .. } | CoreError::MalformedEvent { .. } => {
                ApiError::new(ErrorCode::InvalidEvent, message)
            }
            CoreError::Parse { offset, .. } => ApiError::new(ErrorCode::ParseError, message).with("offset", offset),
            CoreError::UnsupportedVersion(_) => ApiError::new(ErrorCode::UnsupportedVersion, message),
            CoreError::ReservedAction(_) => ApiError::internal(message),
        }
    }
}

impl From<DataError> for ApiError {
    fn from(e: DataError) -> Self {
        let message = e.to_string();
        match e {
            DataError::Validation(_) => ApiError::new(ErrorCode::ValidationFailed, message),
            DataError::NotFound(url) => ApiError::new(ErrorCode::RecordNotFound, message).with("url", url),
            DataError::Transport { url, .. } => ApiError::new(ErrorCode::UpstreamUnavailable, message).with("url", url),
            DataError::Status { url, status } => ApiError::new(ErrorCode::UpstreamUnavailable, message)
                .with("url", url)
                .with("status", status),
            DataError::Parse { offset, .. } => {
                ApiError::new(ErrorCode::UpstreamInvalid, message).with("offset", offset)
            }
            DataError::InvalidRecord(_) => ApiError::new(ErrorCode::UpstreamInvalid, message),
            DataError::UnrecordedFixture(req) => ApiError::new(ErrorCode::NotRecorded, message).with("request", req),
            DataError::Fixture(_) => ApiError::internal(message),
        }
    }
}

impl From<TileError> for ApiError {
    fn from(e: TileError) -> Self {
        let message = e.to_string();
        match e {
            TileError::LayoutTooLarge { nodes, limit } => {
                ApiError::new(ErrorCode::LayoutTooLarge, message).with("nodes", nodes).with("limit", limit)
            }
            TileError::LayoutParse { line, .. } | TileError::DuplicateId { line, .. } => {
                ApiError::new(ErrorCode::ParseError, message).with("line", line)
            }
            TileError::MissingPosition(_) | TileError::NonFinite(_) | TileError::EdgeEndpoint(_) => {
                ApiError::new(ErrorCode::ValidationFailed, message)
            }
            TileError::ZoomOutOfRange(z) => ApiError::new(ErrorCode::TileOutOfRange, message).with("z", z),
            TileError::Io(_) => ApiError::storage(message),
            TileError::DimensionMismatch { .. } | TileError::Png(_) | TileError::Manifest(_) => {
                ApiError::internal(message)
            }
        }
    }
}

impl From<combine_analysis::AnalysisError> for ApiError {
    fn from(e: combine_analysis::AnalysisError) -> Self {
        match e {
            combine_analysis::AnalysisError::InvalidGraph { line, .. } => {
                let err = ApiError::new(ErrorCode::ParseError, e.to_string());
                match line {
                    Some(l) => err.with("line", l),
                    None => err,
                }
            }
            other => ApiError::new(ErrorCode::ValidationFailed, other.to_string()),
        }
    }
}

impl From<GrnaError> for ApiError {
    fn from(e: GrnaError) -> Self {
        let message = e.to_string();
        match e {
            GrnaError::InvalidBase { offset, .. } => {
                ApiError::new(ErrorCode::InvalidSequence, message).with("offset", offset)
            }
            GrnaError::Fasta { line, .. } => ApiError::new(ErrorCode::InvalidSequence, message).with("line", line),
            _ => ApiError::new(ErrorCode::InvalidSequence, message),
        }
    }
}

pub type ApiResult<T> = Result<T, ApiError>;

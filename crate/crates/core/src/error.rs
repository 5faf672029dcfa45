use thiserror::Error;

use crate::validate::ValidationReport;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid table{}{}: {message}", fmt_row(*.row), fmt_col(.column))]
    InvalidTable {
        row: Option<usize>,
        column: Option<String>,
        message: String,
    },

    #[error("invalid anchor: {0}")]
    InvalidAnchor(String),

    #[error("unknown id {0:?}")]
    UnknownId(String),

    #[error("unknown action {0:?}")]
    UnknownAction(String),

    #[error("action name {0:?} is reserved for built-in events")]
    ReservedAction(String),

    #[error("action {action:?} failed at {anchor}: {message}")]
    ActionFailed {
        action: String,
        anchor: String,
        message: String,
    },

    #[error("event sequence gap: expected seq {expected}, found {found}")]
    SequenceGap { expected: u64, found: u64 },

    #[error("malformed event {seq}: {message}")]
    MalformedEvent { seq: u64, message: String },

    #[error("invalid position for node {node:?}: {message}")]
    InvalidPosition { node: String, message: String },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unsupported document version {0:?}")]
    UnsupportedVersion(String),

    #[error("document failed validation:\n{0}")]
    Invalid(ValidationReport),
}

fn fmt_row(row: Option<usize>) -> String {
    row.map(|r| format!(" (row {r})")).unwrap_or_default()
}

fn fmt_col(col: &Option<String>) -> String {
    col.as_ref()
        .map(|c| format!(" (column {c:?})"))
        .unwrap_or_default()
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;

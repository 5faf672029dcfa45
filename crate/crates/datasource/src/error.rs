use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    /// Rejected before any request was made.
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("transport failure for {url}: {message}")]
    Transport { url: String, message: String },

    #[error("{url} answered with status {status}")]
    Status { url: String, status: u16 },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("malformed payload at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// The payload parsed but breaks a record invariant.
    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("no recorded fixture for {0}")]
    UnrecordedFixture(String),

    #[error("fixture store: {0}")]
    Fixture(String),
}

impl DataError {
    pub fn is_transport(&self) -> bool {
        matches!(self, DataError::Transport { .. })
    }
}

pub type Result<T, E = DataError> = std::result::Result<T, E>;

use thiserror::Error;

use crate::smiles::SmilesError;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Smiles(#[from] SmilesError),

    #[error("no average mass for element {0}")]
    MissingMass(String),

    #[error("fingerprint widths differ: {0} vs {1}")]
    WidthMismatch(usize, usize),

    #[error("input is empty")]
    Empty,

    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),

    #[error("column {0} has no finite values")]
    AllNullColumn(usize),

    #[error("activity value must be positive, got {0}")]
    NonPositiveValue(f64),

    #[error("unknown concentration unit {0:?}")]
    UnknownUnit(String),

    #[error("invalid graph{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    InvalidGraph { line: Option<usize>, message: String },

    #[error("threshold {0} outside [0, 1]")]
    Threshold(f64),
}

pub type Result<T, E = AnalysisError> = std::result::Result<T, E>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TileError {
    #[error("{nodes} nodes exceeds the in-process layout limit of {limit}; import a precomputed layout instead")]
    LayoutTooLarge { nodes: usize, limit: usize },

    #[error("layout line {line}: {message}")]
    LayoutParse { line: usize, message: String },

    #[error("duplicate node id {id:?} on line {line}")]
    DuplicateId { id: String, line: usize },

    #[error("node {0} has no position")]
    MissingPosition(String),

    #[error("position of node {0} is not finite")]
    NonFinite(String),

    #[error("zoom level {0} outside 0..=6")]
    ZoomOutOfRange(u8),

    #[error("image is {width}x{height}, expected {expected}x{expected}")]
    DimensionMismatch { width: u32, height: u32, expected: u32 },

    #[error("edge endpoint {0} outside the node range")]
    EdgeEndpoint(usize),

    #[error("png: {0}")]
    Png(String),

    #[error("manifest: {0}")]
    Manifest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = TileError> = std::result::Result<T, E>;

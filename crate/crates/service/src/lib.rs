//! HTTP service and command-line tool tying the workbench crates together.

pub mod actions;
pub mod api;
pub mod cli;
pub mod config;
pub mod error;
pub mod grna_run;
pub mod pyramids;
pub mod store;

pub use api::{router, AppState, SharedState};
pub use config::ServerConfig;
pub use error::{ApiError, ApiResult, ErrorCode};

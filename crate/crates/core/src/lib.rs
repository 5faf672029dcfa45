//! The knowledge-network document model.
//!
//! A [`KnowledgeNetwork`] is a graph of [`AppNode`]s, each holding a typed
//! [`DataTable`] and a string [`MetadataMap`], joined by [`Edge`]s whose
//! endpoints are [`Anchor`]s at node or cell granularity. Every mutation is
//! recorded as an [`InteractionEvent`]; replaying the log through an
//! [`ActionRegistry`] rebuilds the same document byte for byte.

pub mod canonical;
pub mod cell;
pub mod error;
pub mod lazy;
pub mod model;
pub mod ops;
pub mod persist;
pub mod registry;
pub mod replay;
pub mod table;
pub mod validate;

pub use cell::{Alphabet, CellValue, ColumnKind, FetchPolicy};
pub use error::{CoreError, Result};
pub use lazy::{content_hash, resolve_lazy, Fetcher, LazyReport};
pub use model::{Anchor, AppNode, Edge, EdgeId, EdgeKind, InteractionEvent, KnowledgeNetwork, NodeId};
pub use ops::AnnotationTarget;
pub use persist::{canonical_bytes, load, load_unvalidated, save, Timestamps, FORMAT_VERSION};
pub use registry::{ActionInput, ActionOutput, ActionRegistry};
pub use replay::{replay, replay_check, ReplayCheck};
pub use table::{Column, DataTable, MetadataMap};
pub use validate::{Severity, ValidationReport, Violation};

/// A fresh 128-bit random id, hex encoded.
pub fn fresh_id() -> String {
    format!("{:032x}", rand::random::<u128>())
}

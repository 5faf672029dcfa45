//! Named, pure handlers that turn an interaction into a child node.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::cell::CellValue;
use crate::error::{CoreError, Result};
use crate::model::{Anchor, AppNode};
use crate::table::{DataTable, MetadataMap};

/// Event action names handled by the network itself.
pub const RESERVED_ACTIONS: &[&str] = &[
    "create_node",
    "add_reference_edge",
    "annotate",
    "delete_node",
    "delete_edge",
    "move_node",
];

/// What a handler sees of the interaction.
pub struct ActionInput<'a> {
    pub source: &'a AppNode,
    pub anchor: &'a Anchor,
    /// The anchored cell for cell anchors.
    pub cell: Option<&'a CellValue>,
    pub params: &'a MetadataMap,
}

impl ActionInput<'_> {
    pub fn source_kind(&self) -> &str {
        &self.source.kind
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }
}

/// The child node an action produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionOutput {
    pub kind: String,
    pub title: String,
    pub table: DataTable,
    pub metadata: MetadataMap,
}

impl ActionOutput {
    pub fn new(kind: impl Into<String>, title: impl Into<String>, table: DataTable) -> Self {
        ActionOutput {
            kind: kind.into(),
            title: title.into(),
            table,
            metadata: MetadataMap::new(),
        }
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }
}

pub type ActionHandler =
    Arc<dyn Fn(&ActionInput<'_>) -> std::result::Result<ActionOutput, String> + Send + Sync>;

/// Action name to handler. Handlers must be deterministic in their inputs;
/// replay re-runs them.
#[derive(Clone, Default)]
pub struct ActionRegistry {
    handlers: BTreeMap<String, ActionHandler>,
}

impl fmt::Debug for ActionRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.handlers.keys()).finish()
    }
}

impl ActionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register<F>(&mut self, name: impl Into<String>, handler: F) -> Result<()>
    where
        F: Fn(&ActionInput<'_>) -> std::result::Result<ActionOutput, String> + Send + Sync + 'static,
    {
        let name = name.into();
        if RESERVED_ACTIONS.contains(&name.as_str()) {
            return Err(CoreError::ReservedAction(name));
        }
        self.handlers.insert(name, Arc::new(handler));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&ActionHandler> {
        self.handlers.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.handlers.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.handlers.keys().map(String::as_str)
    }
}

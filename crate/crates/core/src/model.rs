//! Document types of a knowledge network.

use std::collections::BTreeMap;
use std::fmt;

use chrono::{DateTime, SubsecRound, Utc};
use serde::{Deserialize, Serialize};

use crate::cell::CellValue;
use crate::table::{DataTable, MetadataMap};

pub type NodeId = String;
pub type EdgeId = String;

/// An edge endpoint: a whole node or one of its table cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Anchor {
    Node { node: NodeId },
    Cell { node: NodeId, row: usize, column: usize },
}

impl Anchor {
    pub fn node(id: impl Into<NodeId>) -> Self {
        Anchor::Node { node: id.into() }
    }

    pub fn cell(id: impl Into<NodeId>, row: usize, column: usize) -> Self {
        Anchor::Cell {
            node: id.into(),
            row,
            column,
        }
    }

    pub fn node_id(&self) -> &str {
        match self {
            Anchor::Node { node } | Anchor::Cell { node, .. } => node,
        }
    }
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Anchor::Node { node } => write!(f, "node {node}"),
            Anchor::Cell { node, row, column } => write!(f, "cell ({row}, {column}) of {node}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppNode {
    pub id: NodeId,
    pub kind: String,
    pub title: String,
    pub annotation: String,
    pub table: DataTable,
    pub metadata: MetadataMap,
    pub created_seq: u64,
}

impl AppNode {
    /// The cell behind an anchor on this node, if it is a cell anchor in bounds.
    pub fn anchored_cell(&self, anchor: &Anchor) -> Option<&CellValue> {
        match anchor {
            Anchor::Cell { row, column, .. } => self.table.cell(*row, *column),
            Anchor::Node { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    /// Provenance edge from the interacted anchor to the node it produced.
    Spawn,
    /// User-drawn relationship.
    Reference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub source: Anchor,
    pub target: Anchor,
    pub kind: EdgeKind,
    pub directed: bool,
    pub annotation: String,
}

/// One entry of the append-only interaction log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub seq: u64,
    #[serde(with = "seconds")]
    pub timestamp: DateTime<Utc>,
    pub action: String,
    pub source: Option<Anchor>,
    pub params: MetadataMap,
    pub produced_nodes: Vec<NodeId>,
    pub produced_edges: Vec<EdgeId>,
}

/// Current UTC time truncated to whole seconds.
pub fn now_seconds() -> DateTime<Utc> {
    Utc::now().trunc_subsecs(0)
}

mod seconds {
    use chrono::{DateTime, SecondsFormat, SubsecRound, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.to_rfc3339_opts(SecondsFormat::Secs, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let text = String::deserialize(d)?;
        DateTime::parse_from_rfc3339(&text)
            .map(|t| t.with_timezone(&Utc).trunc_subsecs(0))
            .map_err(serde::de::Error::custom)
    }
}

/// A graph of app nodes with its interaction history.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KnowledgeNetwork {
    pub id: String,
    pub annotation: String,
    pub nodes: BTreeMap<NodeId, AppNode>,
    pub edges: BTreeMap<EdgeId, Edge>,
    pub positions: BTreeMap<NodeId, (f64, f64)>,
    pub events: Vec<InteractionEvent>,
}

impl KnowledgeNetwork {
    pub fn new(id: impl Into<String>) -> Self {
        KnowledgeNetwork {
            id: id.into(),
            ..Default::default()
        }
    }

    /// A network with a freshly generated id.
    pub fn with_fresh_id() -> Self {
        Self::new(crate::fresh_id())
    }

    pub fn node(&self, id: &str) -> Option<&AppNode> {
        self.nodes.get(id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.get(id)
    }

    pub fn last_seq(&self) -> u64 {
        self.events.last().map_or(0, |e| e.seq)
    }

    /// The spawn parent of a node, if it was produced by an interaction.
    pub fn spawn_parent(&self, node: &str) -> Option<&str> {
        self.edges
            .values()
            .find(|e| e.kind == EdgeKind::Spawn && e.target.node_id() == node)
            .map(|e| e.source.node_id())
    }

    /// Edges with at least one endpoint on `node`.
    pub fn incident_edges<'a>(&'a self, node: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges
            .values()
            .filter(move |e| e.source.node_id() == node || e.target.node_id() == node)
    }
}

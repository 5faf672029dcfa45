//! Canonical `.combine.json` documents.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::canonical;
use crate::error::{CoreError, Result};
use crate::model::{AppNode, Edge, InteractionEvent, KnowledgeNetwork};

pub const FORMAT_VERSION: &str = "combine/1";
pub const FILE_EXTENSION: &str = ".combine.json";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    version: String,
    network_id: String,
    annotation: String,
    nodes: BTreeMap<String, AppNode>,
    edges: BTreeMap<String, Edge>,
    positions: BTreeMap<String, [f64; 2]>,
    events: Vec<InteractionEvent>,
}

#[derive(Serialize)]
struct DocumentRef<'a> {
    version: &'static str,
    network_id: &'a str,
    annotation: &'a str,
    nodes: &'a BTreeMap<String, AppNode>,
    edges: &'a BTreeMap<String, Edge>,
    positions: BTreeMap<&'a str, [f64; 2]>,
    events: Vec<serde_json::Value>,
}

/// Whether timestamps take part in the canonical bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timestamps {
    Include,
    Exclude,
}

fn document_value(net: &KnowledgeNetwork, ts: Timestamps) -> serde_json::Value {
    let events = net
        .events
        .iter()
        .map(|e| {
            let mut v = serde_json::to_value(e).expect("events serialize");
            if ts == Timestamps::Exclude {
                v.as_object_mut().unwrap().remove("timestamp");
            }
            v
        })
        .collect();
    let doc = DocumentRef {
        version: FORMAT_VERSION,
        network_id: &net.id,
        annotation: &net.annotation,
        nodes: &net.nodes,
        edges: &net.edges,
        positions: net
            .positions
            .iter()
            .map(|(k, &(x, y))| (k.as_str(), [x, y]))
            .collect(),
        events,
    };
    serde_json::to_value(doc).expect("documents serialize")
}

/// Canonical UTF-8 bytes of a network.
pub fn save(net: &KnowledgeNetwork) -> Vec<u8> {
    canonical_bytes(net, Timestamps::Include)
}

pub fn canonical_bytes(net: &KnowledgeNetwork, ts: Timestamps) -> Vec<u8> {
    canonical::value_to_canonical_string(&document_value(net, ts)).into_bytes()
}

/// Byte offset of a serde_json error position within `bytes`.
fn error_offset(bytes: &[u8], err: &serde_json::Error) -> usize {
    if err.is_eof() {
        return bytes.len();
    }
    let (line, column) = (err.line(), err.column());
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for (i, l) in bytes.split(|&b| b == b'\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)).min(bytes.len());
        }
        offset += l.len() + 1;
    }
    bytes.len()
}

fn parse_error(bytes: &[u8], err: serde_json::Error) -> CoreError {
    CoreError::Parse {
        offset: error_offset(bytes, &err),
        message: err.to_string(),
    }
}

/// Parses and validates a document. Validation failures list every
/// violation found.
pub fn load(bytes: &[u8]) -> Result<KnowledgeNetwork> {
    let net = load_unvalidated(bytes)?;
    let report = net.validate();
    if !report.is_valid() {
        return Err(CoreError::Invalid(report));
    }
    Ok(net)
}

/// Parses a document without checking network invariants, so tools can
/// report on broken files.
pub fn load_unvalidated(bytes: &[u8]) -> Result<KnowledgeNetwork> {
    let value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| parse_error(bytes, e))?;
    match value.get("version") {
        Some(serde_json::Value::String(v)) if v == FORMAT_VERSION => {}
        Some(serde_json::Value::String(v)) => return Err(CoreError::UnsupportedVersion(v.clone())),
        _ => {
            return Err(CoreError::Parse {
                offset: 0,
                message: "missing string field \"version\"".into(),
            })
        }
    }
    let doc: Document = serde_json::from_slice(bytes).map_err(|e| parse_error(bytes, e))?;
    Ok(KnowledgeNetwork {
        id: doc.network_id,
        annotation: doc.annotation,
        nodes: doc.nodes,
        edges: doc.edges,
        positions: doc
            .positions
            .into_iter()
            .map(|(k, [x, y])| (k, (x, y)))
            .collect(),
        events: doc.events,
    })
}

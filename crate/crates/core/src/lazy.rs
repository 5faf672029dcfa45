//! Materializing lazy remote references.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

use crate::cell::{CellValue, FetchPolicy};
use crate::model::KnowledgeNetwork;

/// Source of remote payloads: a live client or a fixture store.
pub trait Fetcher {
    fn fetch(&self, url: &str) -> Result<Vec<u8>, String>;
}

impl<F> Fetcher for F
where
    F: Fn(&str) -> Result<Vec<u8>, String>,
{
    fn fetch(&self, url: &str) -> Result<Vec<u8>, String> {
        self(url)
    }
}

/// Location of one cell in a network.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CellLocation {
    pub node: String,
    pub row: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LazyFailure {
    pub location: CellLocation,
    pub url: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LazyReport {
    pub resolved: Vec<CellLocation>,
    pub failures: Vec<LazyFailure>,
    /// Fetched payloads keyed by the hex SHA-256 stored in the blob-ref.
    pub blobs: BTreeMap<String, Vec<u8>>,
}

pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Returns a copy of `net` with every lazy remote-ref replaced by a blob-ref
/// of the fetched bytes. Failed fetches leave the cell untouched and are
/// reported per cell. The event log is not touched: the materialized copy is
/// a loaded view, while the stored document keeps its URLs.
pub fn resolve_lazy(net: &KnowledgeNetwork, fetcher: &dyn Fetcher) -> (KnowledgeNetwork, LazyReport) {
    let mut out = net.clone();
    let mut report = LazyReport::default();
    for (node_id, node) in out.nodes.iter_mut() {
        for (r, row) in node.table.rows.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                let CellValue::RemoteRef { url, media_type, policy: FetchPolicy::Lazy } = cell else {
                    continue;
                };
                let location = CellLocation { node: node_id.clone(), row: r, column: c };
                match fetcher.fetch(url) {
                    Ok(bytes) => {
                        let hash = content_hash(&bytes);
                        *cell = CellValue::BlobRef { hash: hash.clone(), media_type: media_type.clone() };
                        report.blobs.insert(hash, bytes);
                        report.resolved.push(location);
                    }
                    Err(message) => report.failures.push(LazyFailure {
                        location,
                        url: url.clone(),
                        message,
                    }),
                }
            }
        }
    }
    (out, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::ColumnKind;
    use crate::table::{Column, DataTable};

    fn image_net(urls: &[&str]) -> KnowledgeNetwork {
        let mut net = KnowledgeNetwork::new("n");
        let mut t = DataTable::new(vec![Column::new("image", ColumnKind::RemoteRef)]);
        for u in urls {
            t.rows.push(vec![CellValue::lazy_ref(*u, "image/png")]);
        }
        net.create_node("image", "img", t).unwrap();
        net
    }

    #[test]
    fn nothing_to_resolve() {
        let net = image_net(&[]);
        let (out, report) = resolve_lazy(&net, &|_: &str| -> Result<Vec<u8>, String> {
            panic!("no fetch expected")
        });
        assert_eq!(out, net);
        assert!(report.resolved.is_empty() && report.failures.is_empty());
    }

    #[test]
    fn one_resolved_one_failed() {
        let net = image_net(&["https://a/ok.png", "https://a/missing.png"]);
        let payload = b"\x89PNG fixture bytes".to_vec();
        let expected_hash = content_hash(&payload);
        let fetch = |url: &str| {
            if url.ends_with("ok.png") {
                Ok(payload.clone())
            } else {
                Err("404".to_string())
            }
        };
        let (out, report) = resolve_lazy(&net, &fetch);
        assert_eq!(report.resolved.len(), 1);
        assert_eq!(report.failures.len(), 1);
        assert_eq!(report.failures[0].url, "https://a/missing.png");
        let node = out.nodes.values().next().unwrap();
        assert_eq!(
            node.table.rows[0][0],
            CellValue::BlobRef { hash: expected_hash.clone(), media_type: "image/png".into() }
        );
        assert!(matches!(node.table.rows[1][0], CellValue::RemoteRef { .. }));
        assert_eq!(report.blobs[&expected_hash], payload);
        assert!(out.validate().is_valid());
    }
}

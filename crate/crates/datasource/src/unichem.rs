//! UniChem cross-references by InChIKey.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::client::HttpClient;
use crate::error::{DataError, Result};
use crate::parse::json;
use crate::request::Request;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XrefRecord {
    pub source_id: u32,
    pub source_name: String,
    pub compound_id: String,
}

/// Standard InChIKey layout: 14, 10 and 1 uppercase letters.
pub fn is_inchikey(key: &str) -> bool {
    let parts: Vec<&str> = key.split('-').collect();
    parts.len() == 3
        && [14, 10, 1].iter().zip(&parts).all(|(&n, p)| p.len() == n && p.bytes().all(|b| b.is_ascii_uppercase()))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum XrefPayload {
    Rows(Vec<XrefWire>),
    Error {
        #[allow(dead_code)]
        error: String,
    },
}

#[derive(Deserialize)]
struct XrefWire {
    src_id: serde_json::Value,
    src_compound_id: String,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct SourceWire {
    #[serde(rename = "sourceID")]
    source_id: u32,
    name: String,
    name_label: Option<String>,
}

#[derive(Deserialize)]
struct SourcesPage {
    sources: Vec<SourceWire>,
}

pub struct UnichemClient {
    http: Arc<HttpClient>,
    base: String,
    names: Mutex<Option<BTreeMap<u32, String>>>,
}

impl UnichemClient {
    pub fn new(http: Arc<HttpClient>, base: impl Into<String>) -> Self {
        UnichemClient { http, base: base.into(), names: Mutex::new(None) }
    }

    /// Source id to display name, fetched once per client.
    pub fn source_names(&self) -> Result<BTreeMap<u32, String>> {
        let mut cached = self.names.lock().unwrap();
        if let Some(names) = cached.as_ref() {
            return Ok(names.clone());
        }
        let req = Request::build(&self.base, &["api", "v1", "sources", ""], &[])?;
        let page: SourcesPage = json(&self.http.get(&req)?.body)?;
        let names: BTreeMap<u32, String> =
            page.sources.into_iter().map(|s| (s.source_id, s.name_label.unwrap_or(s.name))).collect();
        *cached = Some(names.clone());
        Ok(names)
    }

    pub fn xrefs(&self, inchikey: &str) -> Result<Vec<XrefRecord>> {
        if !is_inchikey(inchikey) {
            return Err(DataError::Validation(format!("{inchikey:?} is not a standard InChIKey")));
        }
        let req = Request::build(&self.base, &["rest", "inchikey", inchikey], &[])?;
        let rows = match json::<XrefPayload>(&self.http.get(&req)?.body)? {
            XrefPayload::Rows(rows) => rows,
            XrefPayload::Error { .. } => return Ok(Vec::new()),
        };
        if rows.is_empty() {
            return Ok(Vec::new());
        }
        let names = self.source_names()?;
        rows.into_iter()
            .map(|r| {
                let id = match &r.src_id {
                    serde_json::Value::Number(n) => n.as_u64(),
                    serde_json::Value::String(s) => s.parse().ok(),
                    _ => None,
                }
                .filter(|&id| (1..=u32::MAX as u64).contains(&id))
                .ok_or_else(|| DataError::InvalidRecord(format!("source id {}", r.src_id)))? as u32;
                Ok(XrefRecord {
                    source_id: id,
                    source_name: names.get(&id).cloned().unwrap_or_else(|| format!("source {id}")),
                    compound_id: r.src_compound_id,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_shape() {
        assert!(is_inchikey("BSYNRYMUTXBXSQ-UHFFFAOYSA-N"));
        assert!(!is_inchikey("bsynrymutxbxsq-uhfffaoysa-n"));
        assert!(!is_inchikey("BSYNRYMUTXBXSQ-UHFFFAOYSA"));
        assert!(!is_inchikey("BSYNRYMUTXBXS1-UHFFFAOYSA-N"));
    }
}

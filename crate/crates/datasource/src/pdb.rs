//! RCSB PDB entry metadata and structure images.

use std::sync::Arc;

use combine_core::CellValue;
use serde::{Deserialize, Serialize};

use crate::client::HttpClient;
use crate::error::{DataError, Result};
use crate::parse::json;
use crate::request::Request;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdbEntry {
    pub id: String,
    pub title: String,
    pub method: Option<String>,
    pub resolution: Option<f64>,
    pub release_date: Option<String>,
    /// Lazy reference to the assembly image.
    pub image: CellValue,
}

/// Four characters: a digit 1-9 then three letters or digits.
pub fn is_pdb_id(id: &str) -> bool {
    let b = id.as_bytes();
    b.len() == 4 && (b'1'..=b'9').contains(&b[0]) && b[1..].iter().all(u8::is_ascii_alphanumeric)
}

/// `{image_base}/{id[1..3]}/{id}/{id}_assembly-1.jpeg`, id lowercased.
/// `id` must satisfy [`is_pdb_id`].
pub fn image_url(image_base: &str, id: &str) -> String {
    let lower = id.to_ascii_lowercase();
    format!("{}/{}/{lower}/{lower}_assembly-1.jpeg", image_base.trim_end_matches('/'), &lower[1..3])
}

#[derive(Deserialize)]
struct Struct {
    title: Option<String>,
}

#[derive(Deserialize)]
struct Exptl {
    method: Option<String>,
}

#[derive(Deserialize, Default)]
struct EntryInfo {
    #[serde(default)]
    resolution_combined: Vec<f64>,
}

#[derive(Deserialize, Default)]
struct Accession {
    initial_release_date: Option<String>,
}

#[derive(Deserialize)]
struct EntryWire {
    rcsb_id: String,
    #[serde(rename = "struct")]
    structure: Option<Struct>,
    #[serde(default)]
    exptl: Vec<Exptl>,
    #[serde(default)]
    rcsb_entry_info: EntryInfo,
    #[serde(default)]
    rcsb_accession_info: Accession,
}

pub struct PdbClient {
    http: Arc<HttpClient>,
    base: String,
    image_base: String,
}

impl PdbClient {
    pub fn new(http: Arc<HttpClient>, base: impl Into<String>, image_base: impl Into<String>) -> Self {
        PdbClient { http, base: base.into(), image_base: image_base.into() }
    }

    pub fn image_url(&self, id: &str) -> String {
        image_url(&self.image_base, id)
    }

    pub fn fetch(&self, id: &str) -> Result<PdbEntry> {
        if !is_pdb_id(id) {
            return Err(DataError::Validation(format!("{id:?} is not a PDB id")));
        }
        let upper = id.to_ascii_uppercase();
        let req = Request::build(&self.base, &["rest", "v1", "core", "entry", &upper], &[])?;
        let entry: EntryWire = json(&self.http.get(&req)?.body)?;
        Ok(PdbEntry {
            title: entry.structure.and_then(|s| s.title).unwrap_or_default(),
            method: entry.exptl.into_iter().find_map(|e| e.method),
            resolution: entry.rcsb_entry_info.resolution_combined.first().copied(),
            release_date: entry.rcsb_accession_info.initial_release_date,
            image: CellValue::lazy_ref(self.image_url(&upper), "image/jpeg"),
            id: entry.rcsb_id,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_shape() {
        assert!(is_pdb_id("1M63") && is_pdb_id("4hhb"));
        assert!(!is_pdb_id("ZZZZZ") && !is_pdb_id("0ABC") && !is_pdb_id("1A-C"));
    }
}

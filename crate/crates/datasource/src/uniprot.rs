//! UniProtKB entries.

use std::sync::Arc;

use combine_core::Alphabet;
use serde::{Deserialize, Serialize};

use crate::client::HttpClient;
use crate::error::{DataError, Result};
use crate::parse::json;
use crate::request::Request;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetRecord {
    pub accession: String,
    pub protein_name: String,
    pub organism: String,
    pub sequence: String,
}

#[derive(Deserialize)]
struct Value {
    value: String,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct Name {
    full_name: Value,
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "camelCase")]
struct Description {
    recommended_name: Option<Name>,
    #[serde(default)]
    submission_names: Vec<Name>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct Organism {
    scientific_name: String,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct EntryWire {
    primary_accession: String,
    #[serde(default)]
    protein_description: Description,
    organism: Option<Organism>,
    sequence: Value,
}

pub struct UniprotClient {
    http: Arc<HttpClient>,
    base: String,
}

impl UniprotClient {
    pub fn new(http: Arc<HttpClient>, base: impl Into<String>) -> Self {
        UniprotClient { http, base: base.into() }
    }

    pub fn fetch(&self, accession: &str) -> Result<TargetRecord> {
        if accession.is_empty() || !accession.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-') {
            return Err(DataError::Validation(format!("bad accession {accession:?}")));
        }
        let file = format!("{accession}.json");
        let req = Request::build(&self.base, &["uniprotkb", &file], &[])?;
        let entry: EntryWire = json(&self.http.get(&req)?.body)?;
        if entry.sequence.value.is_empty() {
            return Err(DataError::InvalidRecord(format!("{accession}: empty sequence")));
        }
        if let Some((i, c)) = Alphabet::Protein.first_invalid(&entry.sequence.value) {
            return Err(DataError::InvalidRecord(format!("{accession}: residue {c:?} at {i} is not a protein letter")));
        }
        let desc = entry.protein_description;
        let protein_name = desc
            .recommended_name
            .or_else(|| desc.submission_names.into_iter().next())
            .map(|n| n.full_name.value)
            .unwrap_or_default();
        Ok(TargetRecord {
            accession: entry.primary_accession,
            protein_name,
            organism: entry.organism.map(|o| o.scientific_name).unwrap_or_default(),
            sequence: entry.sequence.value,
        })
    }
}

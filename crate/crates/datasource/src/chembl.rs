//! ChEMBL web services: structure searches, compounds and activities.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::client::HttpClient;
use crate::error::{DataError, Result};
use crate::parse::{json, lenient_f64};
use crate::request::Request;

pub const DEFAULT_PCHEMBL_MIN: f64 = 6.0;
const PAGE_LIMIT: &str = "1000";
const MAX_PAGES: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompoundRecord {
    pub chembl_id: String,
    pub smiles: Option<String>,
    pub inchikey: Option<String>,
    pub name: Option<String>,
    /// Percent similarity, set by similarity searches.
    pub similarity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityRecord {
    pub assay_id: String,
    pub target_id: String,
    pub activity_type: String,
    pub value: Option<f64>,
    pub unit: Option<String>,
    pub pchembl: Option<f64>,
}

/// How the pChEMBL threshold is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Threshold {
    #[default]
    AtLeast,
    Above,
}

pub fn is_chembl_id(id: &str) -> bool {
    id.strip_prefix("CHEMBL").is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

fn check_id(id: &str) -> Result<()> {
    if is_chembl_id(id) {
        Ok(())
    } else {
        Err(DataError::Validation(format!("{id:?} is not a ChEMBL id")))
    }
}

fn check_smiles(smiles: &str) -> Result<()> {
    combine_analysis::parse_smiles(smiles)
        .map(|_| ())
        .map_err(|e| DataError::Validation(format!("SMILES {smiles:?}: {e}")))
}

#[derive(Deserialize)]
struct Structures {
    canonical_smiles: Option<String>,
    standard_inchi_key: Option<String>,
}

#[derive(Deserialize)]
struct MoleculeWire {
    molecule_chembl_id: String,
    pref_name: Option<String>,
    molecule_structures: Option<Structures>,
    #[serde(default, deserialize_with = "lenient_f64")]
    similarity: Option<f64>,
}

impl MoleculeWire {
    fn into_record(self) -> Result<CompoundRecord> {
        if !is_chembl_id(&self.molecule_chembl_id) {
            return Err(DataError::InvalidRecord(format!("molecule id {:?}", self.molecule_chembl_id)));
        }
        let (smiles, inchikey) = match self.molecule_structures {
            Some(s) => (s.canonical_smiles, s.standard_inchi_key),
            None => (None, None),
        };
        Ok(CompoundRecord {
            chembl_id: self.molecule_chembl_id,
            smiles,
            inchikey,
            name: self.pref_name,
            similarity: self.similarity,
        })
    }
}

#[derive(Deserialize, Default)]
struct PageMeta {
    next: Option<String>,
}

#[derive(Deserialize)]
struct MoleculePage {
    molecules: Vec<MoleculeWire>,
}

#[derive(Deserialize)]
struct ActivityWire {
    assay_chembl_id: String,
    target_chembl_id: Option<String>,
    standard_type: Option<String>,
    #[serde(default, deserialize_with = "lenient_f64")]
    standard_value: Option<f64>,
    standard_units: Option<String>,
    #[serde(default, deserialize_with = "lenient_f64")]
    pchembl_value: Option<f64>,
}

#[derive(Deserialize)]
struct ActivityPage {
    activities: Vec<ActivityWire>,
    #[serde(default)]
    page_meta: PageMeta,
}

pub struct ChemblClient {
    http: Arc<HttpClient>,
    base: String,
}

impl ChemblClient {
    pub fn new(http: Arc<HttpClient>, base: impl Into<String>) -> Self {
        ChemblClient { http, base: base.into() }
    }

    fn request(&self, segments: &[&str], query: &[(&str, &str)]) -> Result<Request> {
        Request::build(&self.base, segments, query)
    }

    /// Compounds at or above `cutoff` percent similarity, best first.
    pub fn similarity_search(&self, smiles: &str, cutoff: u32) -> Result<Vec<CompoundRecord>> {
        if !(40..=100).contains(&cutoff) {
            return Err(DataError::Validation(format!("similarity cutoff {cutoff} outside 40..=100")));
        }
        check_smiles(smiles)?;
        let file = format!("{cutoff}.json");
        let req = self.request(&["similarity", smiles, &file], &[])?;
        let page: MoleculePage = json(&self.http.get(&req)?.body)?;
        let mut out = page.molecules.into_iter().map(MoleculeWire::into_record).collect::<Result<Vec<_>>>()?;
        out.sort_by(|a, b| b.similarity.unwrap_or(0.0).total_cmp(&a.similarity.unwrap_or(0.0)));
        Ok(out)
    }

    pub fn substructure_search(&self, smiles: &str) -> Result<Vec<CompoundRecord>> {
        check_smiles(smiles)?;
        let file = format!("{smiles}.json");
        let req = self.request(&["substructure", &file], &[])?;
        let page: MoleculePage = json(&self.http.get(&req)?.body)?;
        page.molecules.into_iter().map(MoleculeWire::into_record).collect()
    }

    pub fn fetch_compound(&self, id: &str) -> Result<CompoundRecord> {
        check_id(id)?;
        let file = format!("{id}.json");
        let req = self.request(&["molecule", &file], &[])?;
        json::<MoleculeWire>(&self.http.get(&req)?.body)?.into_record()
    }

    /// Activities with a pChEMBL value of at least `pchembl_min`.
    pub fn fetch_activities(&self, id: &str, pchembl_min: f64) -> Result<Vec<ActivityRecord>> {
        self.fetch_activities_with(id, pchembl_min, Threshold::AtLeast)
    }

    pub fn fetch_activities_with(&self, id: &str, pchembl_min: f64, threshold: Threshold) -> Result<Vec<ActivityRecord>> {
        check_id(id)?;
        let mut req = self.request(&["activity.json"], &[("molecule_chembl_id", id), ("limit", PAGE_LIMIT)])?;
        let mut out = Vec::new();
        for _ in 0..MAX_PAGES {
            let page: ActivityPage = json(&self.http.get(&req)?.body)?;
            for a in page.activities {
                let Some(p) = a.pchembl_value else { continue };
                if !(p > 0.0 && p < 15.0) {
                    return Err(DataError::InvalidRecord(format!("pChEMBL {p} in assay {}", a.assay_chembl_id)));
                }
                let keep = match threshold {
                    Threshold::AtLeast => p >= pchembl_min,
                    Threshold::Above => p > pchembl_min,
                };
                if keep {
                    out.push(ActivityRecord {
                        assay_id: a.assay_chembl_id,
                        target_id: a.target_chembl_id.unwrap_or_default(),
                        activity_type: a.standard_type.unwrap_or_default(),
                        value: a.standard_value,
                        unit: a.standard_units,
                        pchembl: Some(p),
                    });
                }
            }
            match page.page_meta.next {
                Some(next) if !next.is_empty() => req = self.resolve(&next)?,
                _ => return Ok(out),
            }
        }
        Ok(out)
    }

    /// Pagination links are server-absolute paths.
    fn resolve(&self, next: &str) -> Result<Request> {
        let base = url::Url::parse(&self.base).map_err(|e| DataError::Validation(e.to_string()))?;
        let joined = base.join(next).map_err(|e| DataError::InvalidRecord(format!("next link {next:?}: {e}")))?;
        Request::get(joined.as_str())
    }
}

/// Distinct target ids of the records.
pub fn active_targets(activities: &[ActivityRecord]) -> BTreeSet<String> {
    activities.iter().filter(|a| !a.target_id.is_empty()).map(|a| a.target_id.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_shape() {
        assert!(is_chembl_id("CHEMBL25"));
        assert!(!is_chembl_id("CHEMBL"));
        assert!(!is_chembl_id("chembl25"));
        assert!(!is_chembl_id("CHEMBL25a"));
    }

    #[test]
    fn targets_collapse() {
        let rec = |t: &str| ActivityRecord {
            assay_id: "CHEMBL1".into(),
            target_id: t.into(),
            activity_type: "IC50".into(),
            value: None,
            unit: None,
            pchembl: Some(7.0),
        };
        assert!(active_targets(&[]).is_empty());
        let set = active_targets(&[rec("CHEMBL2"), rec("CHEMBL2"), rec("CHEMBL3")]);
        assert_eq!(set.into_iter().collect::<Vec<_>>(), vec!["CHEMBL2", "CHEMBL3"]);
    }
}

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::matcher::{off_targets, OffTargetReport};
use crate::seq::{gc_content, rc_unchecked, DnaSequence, Pam};
use crate::{GrnaError, Result, PROTOSPACER_LEN, SITE_LEN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Strand {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl std::fmt::Display for Strand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strand::Plus => "+",
            Strand::Minus => "-",
        })
    }
}

/// What to do with a 23-mer found more than once among the candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Dedupe {
    /// Drop every copy.
    #[default]
    DropRepeated,
    /// Keep the first occurrence in output order.
    KeepFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GcRegion {
    #[default]
    Protospacer,
    Site,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SiteOptions {
    pub pam: Pam,
    pub dedupe: Dedupe,
    pub gc_region: GcRegion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSite {
    /// 0-based start of the 23-nt window in the query.
    pub position: usize,
    pub strand: Strand,
    /// 5' to 3' on the targeted strand.
    pub sequence: String,
    pub protospacer: String,
    pub pam: String,
    pub gc: f64,
}

impl TargetSite {
    fn new(position: usize, strand: Strand, sequence: String, gc_region: GcRegion) -> Self {
        let protospacer = sequence[..PROTOSPACER_LEN].to_string();
        let pam = sequence[PROTOSPACER_LEN..].to_string();
        let gc_of = match gc_region {
            GcRegion::Protospacer => &protospacer,
            GcRegion::Site => &sequence,
        };
        let gc = gc_content(gc_of).expect("site bases are validated");
        TargetSite { position, strand, sequence, protospacer, pam, gc }
    }
}

/// Candidate sites on both strands, ordered by position then strand.
/// Windows containing `N` are skipped.
pub fn find_sites(query: &DnaSequence, opts: &SiteOptions) -> Result<Vec<TargetSite>> {
    if query.len() < SITE_LEN {
        return Err(GrnaError::TooShort { len: query.len() });
    }
    let q = query.as_str();
    let mut sites = Vec::new();
    for p in 0..=q.len() - SITE_LEN {
        let w = &q[p..p + SITE_LEN];
        if w.contains('N') {
            continue;
        }
        if opts.pam.matches(&w.as_bytes()[PROTOSPACER_LEN..]) {
            sites.push(TargetSite::new(p, Strand::Plus, w.to_string(), opts.gc_region));
        }
        let rc = rc_unchecked(w);
        if opts.pam.matches(&rc.as_bytes()[PROTOSPACER_LEN..]) {
            sites.push(TargetSite::new(p, Strand::Minus, rc, opts.gc_region));
        }
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for s in &sites {
        *counts.entry(s.sequence.as_str()).or_default() += 1;
    }
    let keep: Vec<bool> = match opts.dedupe {
        Dedupe::DropRepeated => sites.iter().map(|s| counts[s.sequence.as_str()] == 1).collect(),
        Dedupe::KeepFirst => {
            let mut seen = std::collections::HashSet::new();
            sites.iter().map(|s| seen.insert(s.sequence.as_str())).collect()
        }
    };
    let mut keep = keep.into_iter();
    sites.retain(|_| keep.next().unwrap());
    Ok(sites)
}

/// Sites of `query` with off-target reports against `references`.
pub fn design(
    query: &DnaSequence,
    references: &[DnaSequence],
    opts: &SiteOptions,
) -> Result<Vec<OffTargetReport>> {
    find_sites(query, opts)?
        .into_iter()
        .map(|site| off_targets(&site, references, &opts.pam))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dna(s: &str) -> DnaSequence {
        DnaSequence::new("q", s).unwrap()
    }

    #[test]
    fn single_plus_site() {
        let q = dna(&format!("{}CGG", "A".repeat(20)));
        let sites = find_sites(&q, &SiteOptions::default()).unwrap();
        assert_eq!(sites.len(), 1);
        let s = &sites[0];
        assert_eq!((s.position, s.strand), (0, Strand::Plus));
        assert_eq!(s.protospacer, "A".repeat(20));
        assert_eq!(s.pam, "CGG");
        assert_eq!(s.gc, 0.0);
    }

    #[test]
    fn single_minus_site() {
        let q = dna(&format!("CCG{}", "T".repeat(20)));
        let sites = find_sites(&q, &SiteOptions::default()).unwrap();
        assert_eq!(sites.len(), 1);
        assert_eq!(sites[0].strand, Strand::Minus);
        assert_eq!(sites[0].sequence, format!("{}CGG", "A".repeat(20)));
    }

    #[test]
    fn no_pam_no_sites() {
        assert!(find_sites(&dna(&"A".repeat(23)), &SiteOptions::default()).unwrap().is_empty());
        assert_eq!(
            find_sites(&dna("ACGT"), &SiteOptions::default()),
            Err(GrnaError::TooShort { len: 4 })
        );
    }

    #[test]
    fn repeated_sites_dropped_or_kept_once() {
        let unit = format!("{}AGG", "ACGTACGTTTGACCATGCAT");
        let q = dna(&format!("{unit}TTTTT{unit}"));
        let all = SiteOptions { dedupe: Dedupe::KeepFirst, ..Default::default() };
        let kept = find_sites(&q, &all).unwrap();
        assert!(kept.iter().any(|s| s.sequence == unit));
        let dropped = find_sites(&q, &SiteOptions::default()).unwrap();
        assert!(dropped.iter().all(|s| s.sequence != unit));
    }

    #[test]
    fn gc_region_switch() {
        let q = dna(&format!("{}CGG", "A".repeat(20)));
        let opts = SiteOptions { gc_region: GcRegion::Site, ..Default::default() };
        let s = &find_sites(&q, &opts).unwrap()[0];
        assert!((s.gc - 300.0 / 23.0).abs() < 1e-12);
    }
}

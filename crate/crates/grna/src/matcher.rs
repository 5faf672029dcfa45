//! Off-target scan over both reference strands.
//!
//! Protospacers are packed two bits per base into a `u64` so the Hamming
//! distance of a window is one XOR and a popcount. `N` bases in the
//! reference are tracked in a separate mask and always count as mismatches.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::seq::{rc_unchecked, DnaSequence, Pam};
use crate::sites::{Strand, TargetSite};
use crate::{GrnaError, Result, PROTOSPACER_LEN, SITE_LEN};

const MAX_MISMATCHES: u32 = 2;
/// Low bit of every 2-bit lane.
const LANE_LOW: u64 = 0x5555_5555_5555_5555 & ((1 << (2 * PROTOSPACER_LEN)) - 1);
const CODE_MASK: u64 = (1 << (2 * PROTOSPACER_LEN)) - 1;
const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Locus {
    pub record: String,
    pub position: usize,
    pub strand: Strand,
    /// 23-mer 5' to 3' on the matched strand.
    pub sequence: String,
    pub mismatches: u32,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffTargetReport {
    pub site: TargetSite,
    pub one_mismatch: usize,
    pub two_mismatches: usize,
    /// Every locus within two mismatches, exact hits included.
    pub loci: Vec<Locus>,
}

fn base_code(b: u8) -> (u64, u64) {
    match b {
        b'A' => (0, 0),
        b'C' => (1, 0),
        b'G' => (2, 0),
        b'T' => (3, 0),
        _ => (0, 1),
    }
}

fn pack(s: &[u8]) -> u64 {
    s.iter().fold(0, |acc, &b| (acc << 2) | base_code(b).0)
}

/// Packed 20-mer codes and `N` lane masks for every start position.
fn window_codes(seq: &[u8]) -> Vec<(u64, u64)> {
    let mut out = Vec::with_capacity(seq.len().saturating_sub(PROTOSPACER_LEN - 1));
    let (mut code, mut nmask) = (0u64, 0u64);
    for (i, &b) in seq.iter().enumerate() {
        let (c, n) = base_code(b);
        code = ((code << 2) | c) & CODE_MASK;
        nmask = ((nmask << 2) | n) & CODE_MASK;
        if i + 1 >= PROTOSPACER_LEN {
            out.push((code, nmask));
        }
    }
    out
}

fn distance(window: (u64, u64), target: u64) -> u32 {
    let x = window.0 ^ target;
    (((x | (x >> 1)) & LANE_LOW) | window.1).count_ones()
}

/// Loci within two mismatches of the site's protospacer whose PAM matches
/// exactly. Mismatch counts exclude exact hits.
pub fn off_targets(site: &TargetSite, references: &[DnaSequence], pam: &Pam) -> Result<OffTargetReport> {
    if references.iter().all(|r| r.len() < SITE_LEN) {
        return Err(GrnaError::TooShort { len: references.iter().map(DnaSequence::len).max().unwrap_or(0) });
    }
    let plus_target = pack(site.protospacer.as_bytes());
    let minus_target = pack(rc_unchecked(&site.protospacer).as_bytes());
    let minus_pam = pam.reverse_complement();
    let mut loci = Vec::new();
    for reference in references.iter().filter(|r| r.len() >= SITE_LEN) {
        let r = reference.as_bytes();
        let codes = window_codes(r);
        let windows = r.len() - SITE_LEN + 1;
        let starts: Vec<usize> = (0..windows).step_by(CHUNK).collect();
        let found: Vec<Vec<Locus>> = starts
            .par_iter()
            .map(|&lo| {
                let mut out = Vec::new();
                for p in lo..(lo + CHUNK).min(windows) {
                    let w = &r[p..p + SITE_LEN];
                    if pam.matches(&w[PROTOSPACER_LEN..]) {
                        let d = distance(codes[p], plus_target);
                        if d <= MAX_MISMATCHES {
                            out.push(locus(reference, p, Strand::Plus, w.to_vec(), d));
                        }
                    }
                    if minus_pam.matches(&w[..SITE_LEN - PROTOSPACER_LEN]) {
                        let d = distance(codes[p + SITE_LEN - PROTOSPACER_LEN], minus_target);
                        if d <= MAX_MISMATCHES {
                            let rc = rc_unchecked(std::str::from_utf8(w).unwrap()).into_bytes();
                            out.push(locus(reference, p, Strand::Minus, rc, d));
                        }
                    }
                }
                out
            })
            .collect();
        loci.extend(found.into_iter().flatten());
    }
    Ok(OffTargetReport {
        site: site.clone(),
        one_mismatch: loci.iter().filter(|l| l.mismatches == 1).count(),
        two_mismatches: loci.iter().filter(|l| l.mismatches == 2).count(),
        loci,
    })
}

fn locus(reference: &DnaSequence, position: usize, strand: Strand, seq: Vec<u8>, d: u32) -> Locus {
    Locus {
        record: reference.name.clone(),
        position,
        strand,
        sequence: String::from_utf8(seq).unwrap(),
        mismatches: d,
        exact: d == 0,
    }
}

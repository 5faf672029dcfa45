use serde::{Deserialize, Serialize};

use crate::{GrnaError, Result};

/// Named DNA over `ACGTN`, stored uppercase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DnaSequence {
    pub name: String,
    seq: String,
}

fn check(seq: &str) -> Result<String> {
    seq.char_indices()
        .map(|(offset, ch)| match ch.to_ascii_uppercase() {
            c @ ('A' | 'C' | 'G' | 'T' | 'N') => Ok(c),
            _ => Err(GrnaError::InvalidBase { offset, ch }),
        })
        .collect()
}

impl DnaSequence {
    /// Lowercase input is accepted and uppercased.
    pub fn new(name: impl Into<String>, seq: &str) -> Result<Self> {
        if seq.is_empty() {
            return Err(GrnaError::Empty);
        }
        Ok(DnaSequence { name: name.into(), seq: check(seq)? })
    }

    pub fn as_str(&self) -> &str {
        &self.seq
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.seq.as_bytes()
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn reverse_complement(&self) -> DnaSequence {
        DnaSequence { name: self.name.clone(), seq: rc_unchecked(&self.seq) }
    }
}

pub(crate) fn complement(b: u8) -> u8 {
    match b {
        b'A' => b'T',
        b'T' => b'A',
        b'C' => b'G',
        b'G' => b'C',
        other => other,
    }
}

pub(crate) fn rc_unchecked(s: &str) -> String {
    s.bytes().rev().map(|b| complement(b) as char).collect()
}

pub fn reverse_complement(seq: &str) -> Result<String> {
    Ok(rc_unchecked(&check(seq)?))
}

/// Percent of G and C; `N` counts toward the length only.
pub fn gc_content(seq: &str) -> Result<f64> {
    if seq.is_empty() {
        return Err(GrnaError::Empty);
    }
    let seq = check(seq)?;
    let gc = seq.bytes().filter(|b| matches!(b, b'G' | b'C')).count();
    Ok(100.0 * gc as f64 / seq.len() as f64)
}

/// PAM pattern over `ACGTN`, where `N` matches any base.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pam(String);

impl Default for Pam {
    fn default() -> Self {
        Pam("NGG".into())
    }
}

impl std::str::FromStr for Pam {
    type Err = GrnaError;

    fn from_str(s: &str) -> Result<Self> {
        match check(s) {
            Ok(p) if p.len() == crate::SITE_LEN - crate::PROTOSPACER_LEN => Ok(Pam(p)),
            _ => Err(GrnaError::BadPam(s.to_string())),
        }
    }
}

impl std::fmt::Display for Pam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl Pam {
    /// A concrete base matches `N` in the pattern; an `N` in the sequence
    /// matches nothing.
    pub fn matches(&self, bases: &[u8]) -> bool {
        bases.len() == self.0.len()
            && self.0.bytes().zip(bases).all(|(p, &b)| b != b'N' && (p == b'N' || p == b))
    }

    /// Pattern seen on the opposite strand.
    pub fn reverse_complement(&self) -> Pam {
        Pam(rc_unchecked(&self.0))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reverse_complements() {
        assert_eq!(reverse_complement("ACGT").unwrap(), "ACGT");
        assert_eq!(reverse_complement("AAA").unwrap(), "TTT");
        assert_eq!(reverse_complement("ACGTN").unwrap(), "NACGT");
        assert_eq!(
            reverse_complement("ACXT"),
            Err(GrnaError::InvalidBase { offset: 2, ch: 'X' })
        );
    }

    #[test]
    fn gc() {
        assert_eq!(gc_content("ATGC").unwrap(), 50.0);
        assert_eq!(gc_content("AAAA").unwrap(), 0.0);
        assert_eq!(gc_content("GGCC").unwrap(), 100.0);
        assert_eq!(gc_content("GN").unwrap(), 50.0);
        assert_eq!(gc_content(""), Err(GrnaError::Empty));
    }

    #[test]
    fn pam_matching() {
        let pam = Pam::default();
        assert!(pam.matches(b"AGG") && pam.matches(b"CGG"));
        assert!(!pam.matches(b"CTT") && !pam.matches(b"NGG") && !pam.matches(b"GG"));
        assert_eq!(pam.reverse_complement().as_str(), "CCN");
        assert!("NAG".parse::<Pam>().is_ok());
        assert!("NGGG".parse::<Pam>().is_err());
    }
}

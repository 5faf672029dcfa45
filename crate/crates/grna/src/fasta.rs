use crate::seq::DnaSequence;
use crate::{GrnaError, Result};

/// Reads FASTA records. Text without any `>` header is one record named
/// `sequence`. Whitespace inside sequence lines is ignored.
pub fn parse_fasta(text: &str) -> Result<Vec<DnaSequence>> {
    let mut records: Vec<(String, String, usize)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        if let Some(header) = line.strip_prefix('>') {
            let name = header.split_whitespace().next().unwrap_or("").to_string();
            records.push((name, String::new(), line_no));
            continue;
        }
        if records.is_empty() {
            records.push(("sequence".into(), String::new(), line_no));
        }
        let body: String = line.split_whitespace().collect();
        if let Some(pos) = body.find(|c: char| !matches!(c.to_ascii_uppercase(), 'A' | 'C' | 'G' | 'T' | 'N')) {
            let ch = body[pos..].chars().next().unwrap();
            return Err(GrnaError::Fasta { line: line_no, message: format!("invalid base {ch:?}") });
        }
        records.last_mut().unwrap().1.push_str(&body);
    }
    if records.is_empty() {
        return Err(GrnaError::Empty);
    }
    records
        .into_iter()
        .map(|(name, seq, line)| {
            DnaSequence::new(name, &seq).map_err(|_| GrnaError::Fasta { line, message: "record has no sequence".into() })
        })
        .collect()
}

/// FASTA text with 60-column lines.
pub fn to_fasta(records: &[DnaSequence]) -> String {
    let mut out = String::new();
    for r in records {
        out.push('>');
        out.push_str(&r.name);
        out.push('\n');
        for chunk in r.as_bytes().chunks(60) {
            out.push_str(std::str::from_utf8(chunk).unwrap());
            out.push('\n');
        }
    }
    out
}

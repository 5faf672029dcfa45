use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer};

use crate::error::{DataError, Result};

/// Deserializes a payload, reporting failures with a byte offset.
pub fn json<T: DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| DataError::Parse { offset: offset(bytes, &e), message: e.to_string() })
}

fn offset(bytes: &[u8], err: &serde_json::Error) -> usize {
    if err.is_eof() || err.line() == 0 {
        return if err.is_eof() { bytes.len() } else { 0 };
    }
    let mut start = 0;
    for (i, line) in bytes.split(|&b| b == b'\n').enumerate() {
        if i + 1 == err.line() {
            return (start + err.column().saturating_sub(1)).min(bytes.len());
        }
        start += line.len() + 1;
    }
    bytes.len()
}

/// Accepts a number, a numeric string or null.
pub fn lenient_f64<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }
    match Option::<Raw>::deserialize(d)? {
        None => Ok(None),
        Some(Raw::Num(v)) => Ok(Some(v)),
        Some(Raw::Str(s)) if s.trim().is_empty() => Ok(None),
        Some(Raw::Str(s)) => s.trim().parse().map(Some).map_err(serde::de::Error::custom),
    }
}

//! Cell values and column kinds.

use serde::{Deserialize, Serialize};

/// Alphabet of a biological sequence cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alphabet {
    Dna,
    Protein,
}

pub const DNA_ALPHABET: &str = "ACGTN";
pub const PROTEIN_ALPHABET: &str = "ACDEFGHIKLMNPQRSTVWYX";

impl Alphabet {
    pub fn symbols(self) -> &'static str {
        match self {
            Alphabet::Dna => DNA_ALPHABET,
            Alphabet::Protein => PROTEIN_ALPHABET,
        }
    }

    /// Offset of the first character outside the alphabet, if any.
    pub fn first_invalid(self, seq: &str) -> Option<(usize, char)> {
        let symbols = self.symbols();
        seq.char_indices().find(|(_, c)| !symbols.contains(*c))
    }
}

/// When a remote payload is materialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FetchPolicy {
    Eager,
    Lazy,
}

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CellValue {
    Text {
        value: String,
    },
    Number {
        value: f64,
    },
    Identifier {
        namespace: String,
        value: String,
    },
    Structure {
        smiles: String,
    },
    Sequence {
        alphabet: Alphabet,
        value: String,
    },
    RemoteRef {
        url: String,
        media_type: String,
        policy: FetchPolicy,
    },
    BlobRef {
        hash: String,
        media_type: String,
    },
    Null,
}

/// Declared kind of a table column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnKind {
    Text,
    Number,
    Identifier,
    Structure,
    Sequence,
    RemoteRef,
    BlobRef,
}

impl ColumnKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnKind::Text => "text",
            ColumnKind::Number => "number",
            ColumnKind::Identifier => "identifier",
            ColumnKind::Structure => "structure",
            ColumnKind::Sequence => "sequence",
            ColumnKind::RemoteRef => "remote-ref",
            ColumnKind::BlobRef => "blob-ref",
        }
    }
}

impl CellValue {
    pub fn text(value: impl Into<String>) -> Self {
        CellValue::Text {
            value: value.into(),
        }
    }

    pub fn number(value: f64) -> Self {
        CellValue::Number { value }
    }

    pub fn identifier(namespace: impl Into<String>, value: impl Into<String>) -> Self {
        CellValue::Identifier {
            namespace: namespace.into(),
            value: value.into(),
        }
    }

    pub fn structure(smiles: impl Into<String>) -> Self {
        CellValue::Structure {
            smiles: smiles.into(),
        }
    }

    pub fn sequence(alphabet: Alphabet, value: impl Into<String>) -> Self {
        CellValue::Sequence {
            alphabet,
            value: value.into(),
        }
    }

    pub fn lazy_ref(url: impl Into<String>, media_type: impl Into<String>) -> Self {
        CellValue::RemoteRef {
            url: url.into(),
            media_type: media_type.into(),
            policy: FetchPolicy::Lazy,
        }
    }

    /// Kind tag, `None` for null.
    pub fn kind(&self) -> Option<ColumnKind> {
        Some(match self {
            CellValue::Text { .. } => ColumnKind::Text,
            CellValue::Number { .. } => ColumnKind::Number,
            CellValue::Identifier { .. } => ColumnKind::Identifier,
            CellValue::Structure { .. } => ColumnKind::Structure,
            CellValue::Sequence { .. } => ColumnKind::Sequence,
            CellValue::RemoteRef { .. } => ColumnKind::RemoteRef,
            CellValue::BlobRef { .. } => ColumnKind::BlobRef,
            CellValue::Null => return None,
        })
    }

    pub fn is_null(&self) -> bool {
        matches!(self, CellValue::Null)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            CellValue::Number { value } => Some(*value),
            _ => None,
        }
    }

    /// Whether this cell may live in a column of `kind`.
    ///
    /// A remote-ref column also holds blob-refs: materializing a lazy
    /// reference swaps the variant in place.
    pub fn fits(&self, kind: ColumnKind) -> bool {
        match self.kind() {
            None => true,
            Some(k) if k == kind => true,
            Some(ColumnKind::BlobRef) => kind == ColumnKind::RemoteRef,
            Some(_) => false,
        }
    }

    /// Checks value-level invariants (finite numbers, sequence alphabets).
    pub fn check(&self) -> Result<(), String> {
        match self {
            CellValue::Number { value } if !value.is_finite() => {
                Err(format!("number {value} is not finite"))
            }
            CellValue::Sequence { alphabet, value } => match alphabet.first_invalid(value) {
                Some((offset, c)) => Err(format!(
                    "character {c:?} at offset {offset} is not in the {alphabet:?} alphabet"
                )),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

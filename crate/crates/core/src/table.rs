use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::cell::{CellValue, ColumnKind};
use crate::error::CoreError;

/// The per-node string map carried alongside the data table.
pub type MetadataMap = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn new(name: impl Into<String>, kind: ColumnKind) -> Self {
        Column {
            name: name.into(),
            kind,
        }
    }
}

/// A rectangular, column-typed table of cells.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DataTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<CellValue>>,
}

/// One problem found while checking a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableIssue {
    pub row: Option<usize>,
    pub column: Option<String>,
    pub message: String,
}

impl TableIssue {
    fn into_error(self) -> CoreError {
        CoreError::InvalidTable {
            row: self.row,
            column: self.column,
            message: self.message,
        }
    }
}

impl DataTable {
    pub fn new(columns: Vec<Column>) -> Self {
        DataTable {
            columns,
            rows: Vec::new(),
        }
    }

    /// Builder-style row append; validation happens when the table is used.
    pub fn with_row(mut self, row: Vec<CellValue>) -> Self {
        self.rows.push(row);
        self
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<&CellValue> {
        self.rows.get(row).and_then(|r| r.get(col))
    }

    pub fn cell_mut(&mut self, row: usize, col: usize) -> Option<&mut CellValue> {
        self.rows.get_mut(row).and_then(|r| r.get_mut(col))
    }

    /// All cells of one column, top to bottom.
    pub fn column_cells(&self, col: usize) -> impl Iterator<Item = &CellValue> {
        self.rows.iter().filter_map(move |r| r.get(col))
    }

    /// Every invariant violation, in row-major order.
    pub fn issues(&self) -> Vec<TableIssue> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for col in &self.columns {
            if !seen.insert(col.name.as_str()) {
                out.push(TableIssue {
                    row: None,
                    column: Some(col.name.clone()),
                    message: format!("duplicate column name {:?}", col.name),
                });
            }
        }
        let width = self.columns.len();
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != width {
                out.push(TableIssue {
                    row: Some(r),
                    column: None,
                    message: format!("row has {} cells, expected {width}", row.len()),
                });
                continue;
            }
            for (cell, col) in row.iter().zip(&self.columns) {
                if !cell.fits(col.kind) {
                    out.push(TableIssue {
                        row: Some(r),
                        column: Some(col.name.clone()),
                        message: format!(
                            "cell of kind {} in column of kind {}",
                            cell.kind().map_or("null", |k| k.as_str()),
                            col.kind.as_str()
                        ),
                    });
                } else if let Err(message) = cell.check() {
                    out.push(TableIssue {
                        row: Some(r),
                        column: Some(col.name.clone()),
                        message,
                    });
                }
            }
        }
        out
    }

    /// Fails with the first violation.
    pub fn validate(&self) -> Result<(), CoreError> {
        match self.issues().into_iter().next() {
            Some(issue) => Err(issue.into_error()),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_col() -> DataTable {
        DataTable::new(vec![
            Column::new("smiles", ColumnKind::Structure),
            Column::new("ic50", ColumnKind::Number),
        ])
    }

    #[test]
    fn ragged_rows_name_the_row() {
        let t = two_col()
            .with_row(vec![CellValue::structure("C"), CellValue::number(1.0)])
            .with_row(vec![
                CellValue::structure("N"),
                CellValue::number(2.0),
                CellValue::Null,
            ]);
        match t.validate() {
            Err(CoreError::InvalidTable { row, .. }) => assert_eq!(row, Some(1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kind_mismatch_names_the_column() {
        let t = two_col().with_row(vec![CellValue::structure("C"), CellValue::text("x")]);
        match t.validate() {
            Err(CoreError::InvalidTable { row, column, .. }) => {
                assert_eq!(row, Some(0));
                assert_eq!(column.as_deref(), Some("ic50"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_columns_rejected() {
        let t = DataTable::new(vec![
            Column::new("a", ColumnKind::Text),
            Column::new("a", ColumnKind::Number),
        ]);
        assert!(t.validate().is_err());
    }

    #[test]
    fn nulls_fit_anywhere() {
        let t = two_col().with_row(vec![CellValue::Null, CellValue::Null]);
        assert!(t.validate().is_ok());
    }
}

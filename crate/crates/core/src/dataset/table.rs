use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::schema::{ColumnKind, FeatureSchema};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Column {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_numeric(&self) -> Option<&[f64]> {
        match self {
            Column::Numeric(v) => Some(v),
            Column::Categorical(_) => None,
        }
    }

    pub fn as_categorical(&self) -> Option<&[String]> {
        match self {
            Column::Categorical(v) => Some(v),
            Column::Numeric(_) => None,
        }
    }

    fn cell(&self, row: usize) -> String {
        match self {
            Column::Numeric(v) => format_number(v[row]),
            Column::Categorical(v) => v[row].clone(),
        }
    }
}

/// Shortest round-trip representation.
pub(crate) fn format_number(x: f64) -> String {
    format!("{x:?}")
}

/// How rows with missing cells in schema columns are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissingPolicy {
    #[default]
    Strict,
    Lenient,
}

/// A validated rectangular table restricted to the schema's columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub ids: Vec<String>,
    pub columns: IndexMap<String, Column>,
    pub n_rows: usize,
}

fn is_missing(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty()
        || t.eq_ignore_ascii_case("na")
        || t.eq_ignore_ascii_case("n/a")
        || t.eq_ignore_ascii_case("nan")
        || t.eq_ignore_ascii_case("null")
}

impl Table {
    /// Builds a table from in-memory columns, checking the rectangular and
    /// uniqueness invariants.
    pub fn new(ids: Vec<String>, columns: IndexMap<String, Column>) -> Result<Self> {
        let n_rows = ids.len();
        let mut seen = HashSet::new();
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        for (name, col) in &columns {
            if col.len() != n_rows {
                return Err(Error::LengthMismatch { expected: n_rows, found: col.len() });
            }
            if let Column::Numeric(v) = col {
                if let Some(row) = v.iter().position(|x| !x.is_finite()) {
                    return Err(Error::NonNumericCell { row, col: name.clone(), value: format_number(v[row]) });
                }
            }
        }
        Ok(Self { ids, columns, n_rows })
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.columns.get(name).ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    pub fn numeric(&self, name: &str) -> Result<&[f64]> {
        self.column(name)?.as_numeric().ok_or_else(|| Error::InvalidSchema(format!("`{name}` is not numeric")))
    }

    pub fn categorical(&self, name: &str) -> Result<&[String]> {
        self.column(name)?.as_categorical().ok_or_else(|| Error::InvalidSchema(format!("`{name}` is not categorical")))
    }

    /// Keeps only the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Table {
        let ids = rows.iter().map(|&r| self.ids[r].clone()).collect();
        let columns = self
            .columns
            .iter()
            .map(|(k, c)| {
                let c = match c {
                    Column::Numeric(v) => Column::Numeric(rows.iter().map(|&r| v[r]).collect()),
                    Column::Categorical(v) => Column::Categorical(rows.iter().map(|&r| v[r].clone()).collect()),
                };
                (k.clone(), c)
            })
            .collect();
        Table { ids, columns, n_rows: rows.len() }
    }

    /// Writes the id column followed by every other column.
    pub fn write_csv<W: Write>(&self, id_name: &str, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![id_name.to_string()];
        header.extend(self.columns.keys().filter(|k| k.as_str() != id_name).cloned());
        w.write_record(&header)?;
        for r in 0..self.n_rows {
            let mut rec = vec![self.ids[r].clone()];
            for (k, c) in &self.columns {
                if k != id_name {
                    rec.push(c.cell(r));
                }
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Reads and validates a CSV file against a schema.
pub fn load_table(path: &Path, schema: &FeatureSchema, policy: MissingPolicy) -> Result<Table> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_table(file, schema, policy)
}

/// Reads CSV from any reader. The header must name every schema column;
/// extra columns are ignored.
pub fn read_table<R: Read>(reader: R, schema: &FeatureSchema, policy: MissingPolicy) -> Result<Table> {
    schema.validate()?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    let mut positions = Vec::with_capacity(schema.entries.len());
    for e in &schema.entries {
        let pos = header.iter().position(|h| h == e.name).ok_or_else(|| Error::MissingColumn(e.name.clone()))?;
        positions.push(pos);
    }

    let id_name = schema.id().name.clone();
    let mut ids = Vec::new();
    let mut raw: Vec<Vec<f64>> = vec![Vec::new(); schema.entries.len()];
    let mut text: Vec<Vec<String>> = vec![Vec::new(); schema.entries.len()];
    let mut dropped = 0usize;

    'rows: for (row, record) in rdr.records().enumerate() {
        let record = record?;
        // Validate the whole row before committing any cell.
        let mut nums = Vec::with_capacity(schema.entries.len());
        for (e, &pos) in schema.entries.iter().zip(&positions) {
            let cell = record.get(pos).unwrap_or("");
            if is_missing(cell) {
                match policy {
                    MissingPolicy::Strict => return Err(Error::MissingValue { row, col: e.name.clone() }),
                    MissingPolicy::Lenient => {
                        dropped += 1;
                        continue 'rows;
                    }
                }
            }
            if e.kind == ColumnKind::Numeric && e.name != id_name {
                let v: f64 = cell
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| Error::NonNumericCell { row, col: e.name.clone(), value: cell.to_string() })?;
                nums.push(Some(v));
            } else {
                nums.push(None);
            }
        }
        for (k, ((e, &pos), num)) in schema.entries.iter().zip(&positions).zip(nums).enumerate() {
            let cell = record.get(pos).unwrap_or("");
            if e.name == id_name {
                ids.push(cell.to_string());
            } else if let Some(v) = num {
                raw[k].push(v);
            } else {
                text[k].push(cell.to_string());
            }
        }
    }
    if dropped > 0 {
        log::info!("dropped {dropped} rows with missing values");
    }

    let mut columns = IndexMap::new();
    for (k, e) in schema.entries.iter().enumerate() {
        if e.name == id_name {
            continue;
        }
        let col = match e.kind {
            ColumnKind::Numeric => Column::Numeric(std::mem::take(&mut raw[k])),
            ColumnKind::Categorical => Column::Categorical(std::mem::take(&mut text[k])),
        };
        columns.insert(e.name.clone(), col);
    }
    Table::new(ids, columns)
}

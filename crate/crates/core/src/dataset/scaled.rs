use std::io::Write;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::schema::{ColumnKind, FeatureSchema};
use super::table::{format_number, Column, Table};
use super::transform::{encode_categories, normalize_target, scale_minmax, sorted_categories};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeatureValues {
    /// Min-max scaled values in [0, 1].
    Numeric(Vec<f64>),
    /// Indices into the feature's frozen level list.
    Categorical(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureColumn {
    pub name: String,
    /// Schema weight multiplier.
    pub weight: f64,
    pub values: FeatureValues,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PrepareOptions {
    /// Replace the target rate with `ln(1 + rate)`.
    pub log_target: bool,
}

/// Model- and similarity-ready view of a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledTable {
    pub base: Table,
    pub ids: Vec<String>,
    pub features: Vec<FeatureColumn>,
    /// Target rate (per 10k when a population column exists); never scaled.
    pub target: Vec<f64>,
    pub target_name: String,
    pub metadata: IndexMap<String, Vec<String>>,
    pub scale_params: IndexMap<String, (f64, f64)>,
    pub onehot_map: IndexMap<String, Vec<String>>,
}

/// Dense row-major design matrix for the predictive models: scaled numeric
/// features followed in schema order by one indicator column per level.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub names: Vec<String>,
    /// Schema feature each column came from.
    pub parents: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn indicator_name(parent: &str, level: &str) -> String {
    format!("{parent}_{level}")
}

impl ScaledTable {
    pub fn n_rows(&self) -> usize {
        self.ids.len()
    }

    pub fn feature(&self, name: &str) -> Option<&FeatureColumn> {
        self.features.iter().find(|f| f.name == name)
    }

    pub fn design_matrix(&self) -> DesignMatrix {
        let mut names = Vec::new();
        let mut parents = Vec::new();
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for f in &self.features {
            match &f.values {
                FeatureValues::Numeric(v) => {
                    names.push(f.name.clone());
                    parents.push(f.name.clone());
                    cols.push(v.clone());
                }
                FeatureValues::Categorical(codes) => {
                    for (k, level) in self.onehot_map[&f.name].iter().enumerate() {
                        names.push(indicator_name(&f.name, level));
                        parents.push(f.name.clone());
                        cols.push(codes.iter().map(|&c| if c == k { 1.0 } else { 0.0 }).collect());
                    }
                }
            }
        }
        let rows = (0..self.n_rows()).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
        DesignMatrix { names, parents, rows }
    }

    /// Writes ids, target and the expanded design columns.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let design = self.design_matrix();
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["id".to_string(), self.target_name.clone()];
        header.extend(design.names.iter().cloned());
        w.write_record(&header)?;
        for (r, row) in design.rows.iter().enumerate() {
            let mut rec = vec![self.ids[r].clone(), format_number(self.target[r])];
            rec.extend(row.iter().map(|&x| format_number(x)));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Derives the target rate, scales numeric features and freezes category
/// levels.
pub fn prepare(table: &Table, schema: &FeatureSchema, opts: PrepareOptions) -> Result<ScaledTable> {
    schema.validate()?;
    if table.n_rows == 0 {
        return Err(Error::EmptyColumn);
    }
    let target_entry = schema.target();
    let counts = table.numeric(&target_entry.name)?;
    let mut target = match schema.population() {
        Some(p) => {
            let pop = table.numeric(&p.name)?;
            counts.iter().zip(pop).map(|(&c, &p)| normalize_target(c, p)).collect::<Result<Vec<_>>>()?
        }
        None => counts.to_vec(),
    };
    if opts.log_target {
        for t in &mut target {
            *t = t.ln_1p();
        }
    }

    let mut features = Vec::new();
    let mut scale_params = IndexMap::new();
    let mut onehot_map = IndexMap::new();
    for e in schema.features() {
        let values = match e.kind {
            ColumnKind::Numeric => {
                let (scaled, lo, hi) = scale_minmax(table.numeric(&e.name)?)?;
                scale_params.insert(e.name.clone(), (lo, hi));
                FeatureValues::Numeric(scaled)
            }
            ColumnKind::Categorical => {
                let col = table.categorical(&e.name)?;
                let levels = sorted_categories(col);
                let codes = encode_categories(col, &levels)?;
                onehot_map.insert(e.name.clone(), levels);
                FeatureValues::Categorical(codes)
            }
        };
        features.push(FeatureColumn { name: e.name.clone(), weight: e.weight, values });
    }

    let mut metadata = IndexMap::new();
    for e in schema.metadata() {
        let col = match table.column(&e.name)? {
            Column::Categorical(v) => v.clone(),
            Column::Numeric(v) => v.iter().map(|&x| format_number(x)).collect(),
        };
        metadata.insert(e.name.clone(), col);
    }

    Ok(ScaledTable {
        base: table.clone(),
        ids: table.ids.clone(),
        features,
        target,
        target_name: target_entry.name.clone(),
        metadata,
        scale_params,
        onehot_map,
    })
}

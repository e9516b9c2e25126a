use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::artifacts::{write_json, write_with};
use crate::dataset::{Column, ColumnKind, FeatureSchema, Role, SchemaEntry, Table};
use crate::error::{Error, Result};
use crate::rng::{rng_at, substream};

/// Planted-partition generator settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    /// Rows per blob; the blob count is its length.
    pub sizes: Vec<usize>,
    pub n_numeric: usize,
    pub n_categorical: usize,
    /// Distance between neighbouring blob centres on each numeric feature.
    pub shift: f64,
    /// Standard deviation of numeric noise.
    pub noise: f64,
    /// Share of each blob drawn from a wider halo around its centre.
    pub outlier_fraction: f64,
    /// Halo noise as a multiple of `noise`.
    pub outlier_scale: f64,
    /// Probability that a categorical cell takes its blob's level.
    pub categorical_alignment: f64,
    /// Target level per blob; empty spreads 40 down to 5.
    pub target_levels: Vec<f64>,
    /// Target slope on the first numeric feature's within-blob deviation.
    pub target_coef: f64,
    pub target_noise: f64,
    /// Distinct values of the `region` metadata column.
    pub n_regions: usize,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            sizes: vec![20, 20, 20],
            n_numeric: 4,
            n_categorical: 2,
            shift: 1.0,
            noise: 0.1,
            outlier_fraction: 0.1,
            outlier_scale: 5.0,
            categorical_alignment: 0.9,
            target_levels: vec![],
            target_coef: 2.0,
            target_noise: 1.0,
            n_regions: 4,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("synthetic spec: {m}")));
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return bad("every blob needs at least one row");
        }
        if self.n_numeric == 0 {
            return bad("need at least one numeric feature");
        }
        if !(0.0..=1.0).contains(&self.categorical_alignment) {
            return bad("categorical_alignment must lie in [0, 1]");
        }
        if !(self.noise >= 0.0 && self.target_noise >= 0.0 && self.shift.is_finite()) {
            return bad("noise levels must be nonnegative and shift finite");
        }
        if !self.target_levels.is_empty() && self.target_levels.len() != self.sizes.len() {
            return bad("target_levels must have one entry per blob");
        }
        if !(0.0..=1.0).contains(&self.outlier_fraction) || !(self.outlier_scale >= 0.0) {
            return bad("outlier_fraction must lie in [0, 1] and outlier_scale be nonnegative");
        }
        if self.n_regions == 0 {
            return bad("n_regions must be at least 1");
        }
        Ok(())
    }

    /// Planted target level of `blob`.
    pub fn target_level(&self, blob: usize) -> f64 {
        if let Some(&t) = self.target_levels.get(blob) {
            return t;
        }
        let b = self.sizes.len();
        if b == 1 {
            20.0
        } else {
            40.0 - 35.0 * blob as f64 / (b - 1) as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub table: Table,
    pub schema: FeatureSchema,
    /// Planted blob of each row.
    pub labels: Vec<usize>,
}

impl SyntheticData {
    /// Writes `data.csv`, `schema.json` and `labels.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let id = self.schema.id().name.clone();
        Ok(vec![
            write_with(&dir.join("data.csv"), |w| self.table.write_csv(&id, w))?,
            write_json(&dir.join("schema.json"), &self.schema)?,
            write_with(&dir.join("labels.csv"), |w| {
                let mut c = csv::Writer::from_writer(w);
                c.write_record([id.as_str(), "label"])?;
                for (i, l) in self.table.ids.iter().zip(&self.labels) {
                    c.write_record([i.clone(), l.to_string()])?;
                }
                c.flush().map_err(|e| Error::io("labels.csv", e))
            })?,
        ])
    }
}

/// Mixed-type table with planted blobs.
///
/// Blob `b` centres numeric feature `f` at `shift * ((b + f) mod B)`, so each
/// feature orders the blobs differently. Categorical features prefer level
/// `L{(b + f) mod B}`. A fixed share of each blob gets wider numeric noise.
/// The target is the blob's level plus a slope on the
/// first feature's deviation plus noise. Rows are shuffled.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let mut rng = rng_at(substream(spec.seed, "synth"), &[]);
    let blobs = spec.sizes.len();
    // (blob, halo member?) per row; the first round(fraction * size) rows of
    // each blob form the halo.
    let mut rows: Vec<(usize, bool)> = spec
        .sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &n)| {
            let halo = (spec.outlier_fraction * n as f64).round() as usize;
            (0..n).map(move |i| (b, i < halo))
        })
        .collect();
    rows.shuffle(&mut rng);
    let labels: Vec<usize> = rows.iter().map(|r| r.0).collect();
    let n = labels.len();

    let mut numeric = vec![Vec::with_capacity(n); spec.n_numeric];
    let mut categorical = vec![Vec::with_capacity(n); spec.n_categorical];
    let mut target = Vec::with_capacity(n);
    let mut region = Vec::with_capacity(n);
    for &(b, halo) in &rows {
        let sd = if halo { spec.noise * spec.outlier_scale } else { spec.noise };
        let mut first_dev = 0.0;
        for (f, col) in numeric.iter_mut().enumerate() {
            let z: f64 = StandardNormal.sample(&mut rng);
            if f == 0 {
                first_dev = z;
            }
            col.push(spec.shift * ((b + f) % blobs) as f64 + sd * z);
        }
        for (f, col) in categorical.iter_mut().enumerate() {
            let level =
                if rng.gen::<f64>() < spec.categorical_alignment { (b + f) % blobs } else { rng.gen_range(0..blobs) };
            col.push(format!("L{level}"));
        }
        let e: f64 = StandardNormal.sample(&mut rng);
        target.push(spec.target_level(b) + spec.target_coef * first_dev + spec.target_noise * e);
        region.push(format!("R{}", rng.gen_range(0..spec.n_regions)));
    }

    let mut entries = vec![
        SchemaEntry::new("id", ColumnKind::Categorical, Role::Id),
        SchemaEntry::new("y", ColumnKind::Numeric, Role::Target),
    ];
    let mut columns = IndexMap::new();
    columns.insert("y".to_string(), Column::Numeric(target));
    for (f, col) in numeric.into_iter().enumerate() {
        let name = format!("x{}", f + 1);
        entries.push(SchemaEntry::new(&name, ColumnKind::Numeric, Role::Feature));
        columns.insert(name, Column::Numeric(col));
    }
    for (f, col) in categorical.into_iter().enumerate() {
        let name = format!("c{}", f + 1);
        entries.push(SchemaEntry::new(&name, ColumnKind::Categorical, Role::Feature));
        columns.insert(name, Column::Categorical(col));
    }
    entries.push(SchemaEntry::new("region", ColumnKind::Categorical, Role::Metadata));
    columns.insert("region".to_string(), Column::Categorical(region));

    let width = n.to_string().len();
    let ids = (1..=n).map(|i| format!("r{i:0width$}")).collect();
    Ok(SyntheticData { table: Table::new(ids, columns)?, schema: FeatureSchema::new(entries)?, labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_determinism() {
        let spec = SynthSpec { seed: 3, ..SynthSpec::default() };
        let a = generate_synthetic(&spec).unwrap();
        assert_eq!(a.table.n_rows, 60);
        assert_eq!(a.labels.iter().filter(|&&l| l == 2).count(), 20);
        assert_eq!(a, generate_synthetic(&spec).unwrap());
        let b = generate_synthetic(&SynthSpec { seed: 4, ..spec }).unwrap();
        assert_ne!(a.table, b.table);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(generate_synthetic(&SynthSpec { sizes: vec![], ..SynthSpec::default() }).is_err());
        assert!(generate_synthetic(&SynthSpec { target_levels: vec![1.0], ..SynthSpec::default() }).is_err());
    }
}

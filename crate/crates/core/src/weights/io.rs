use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::importance::{MeanStd, Provenance, WeightVector};
use super::metrics::MetricsSummary;
use crate::dataset::ScaledTable;
use crate::error::{Error, Result};

/// On-disk form of `weights.json`. Imports only need `averaged`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsFile {
    #[serde(default)]
    pub models: Vec<String>,
    #[serde(default)]
    pub per_model: IndexMap<String, IndexMap<String, MeanStd>>,
    pub averaged: IndexMap<String, f64>,
    /// Cross-model averages per design column, before clamping and folding.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub averaged_columns: Option<IndexMap<String, f64>>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    /// Cross-validated scores per model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<IndexMap<String, MetricsSummary>>,
}

impl WeightsFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Maps imported weights onto the table's features. Keys may name a schema
/// feature or an indicator column `feature_level`; indicator weights are
/// summed into their feature. Features missing from the file weigh zero.
pub fn resolve_imported(averaged: &IndexMap<String, f64>, table: &ScaledTable) -> Result<WeightVector> {
    let design = table.design_matrix();
    let mut weights: IndexMap<String, f64> = table.features.iter().map(|f| (f.name.clone(), 0.0)).collect();
    for (key, &w) in averaged {
        let parent = if weights.contains_key(key) {
            key.clone()
        } else if let Some(pos) = design.names.iter().position(|n| n == key) {
            design.parents[pos].clone()
        } else {
            return Err(Error::FeatureSetMismatch(format!("imported weight for unknown feature `{key}`")));
        };
        *weights.get_mut(&parent).expect("parent is a feature") += w;
    }
    for (k, w) in &weights {
        if *w == 0.0 {
            log::warn!("feature `{k}` has zero imported weight");
        }
    }
    Ok(WeightVector::new(weights, Provenance::Imported)?.normalized())
}

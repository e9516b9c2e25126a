use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cv::Split;
use super::metrics::{mean_std, metrics, r2_score, MetricsSummary, SplitMetrics};
use super::model::{ModelConfig, Regressor};
use crate::error::{Error, Result};
use crate::rng::{derive, rng_at};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

/// R^2 drop when one column is shuffled, for every column of `x_val`.
///
/// Returns per-feature mean and sample std over `repeats` shuffles. The
/// shuffle for feature `f`, repeat `r` comes from substream `(seed, f, r)`.
pub fn permutation_importance<T: Scalar, M: Regressor<T> + ?Sized>(
    model: &M,
    x_val: &[Vec<T>],
    y_val: &[T],
    repeats: usize,
    seed: u64,
) -> Result<Vec<(T, T)>> {
    if x_val.is_empty() {
        return Err(Error::EmptyColumn);
    }
    let repeats = repeats.max(1);
    let baseline = r2_score(y_val, &model.predict(x_val))?;
    let n = x_val.len();
    let p = x_val[0].len();
    let mut out = Vec::with_capacity(p);
    let mut row = vec![T::zero(); p];
    let mut pred = vec![T::zero(); n];
    for f in 0..p {
        let mut drops = Vec::with_capacity(repeats);
        for r in 0..repeats {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng_at(seed, &[f as u64, r as u64]));
            for (i, slot) in pred.iter_mut().enumerate() {
                row.copy_from_slice(&x_val[i]);
                row[f] = x_val[perm[i]][f];
                *slot = model.predict_row(&row);
            }
            drops.push(baseline - r2_score(y_val, &pred)?);
        }
        let k = T::from_usize_lossy(repeats);
        let mean = drops.iter().copied().sum::<T>() / k;
        let std = if repeats > 1 {
            (drops.iter().map(|&d| (d - mean) * (d - mean)).sum::<T>() / (k - T::one())).sqrt()
        } else {
            T::zero()
        };
        out.push((mean, std));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEvaluation {
    pub model: String,
    pub metrics: MetricsSummary,
    /// Mean and std across splits of the per-split mean importance.
    pub importance: IndexMap<String, MeanStd>,
}

/// Fits `config` on every split, scores the held-out fold and computes
/// permutation importances there. Splits run in parallel; each split's
/// randomness is keyed by `(seed, repeat, fold)`.
pub fn evaluate_model<T: Scalar>(
    x: &[Vec<T>],
    y: &[T],
    names: &[String],
    config: &ModelConfig,
    splits: &[Split],
    perm_repeats: usize,
    seed: u64,
) -> Result<ModelEvaluation> {
    config.validate()?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: y.len(), found: x.len() });
    }
    if x.first().map_or(0, Vec::len) != names.len() {
        return Err(Error::LengthMismatch { expected: names.len(), found: x.first().map_or(0, Vec::len) });
    }
    let per_split: Vec<(SplitMetrics, Vec<f64>)> = splits
        .par_iter()
        .map(|s| {
            let pick = |rows: &[usize]| -> (Vec<Vec<T>>, Vec<T>) {
                (rows.iter().map(|&i| x[i].clone()).collect(), rows.iter().map(|&i| y[i]).collect())
            };
            let (xt, yt) = pick(&s.train);
            let (xv, yv) = pick(&s.validation);
            let coords = [s.repeat as u64, s.fold as u64];
            let model = config.fit(&xt, &yt, derive(seed, &[coords[0], coords[1], 0]))?;
            let m = metrics(&yv, &model.predict(&xv))?;
            let imp = permutation_importance(&model, &xv, &yv, perm_repeats, derive(seed, &[coords[0], coords[1], 1]))?;
            Ok((
                SplitMetrics {
                    repeat: s.repeat,
                    fold: s.fold,
                    r2: m.r2.to_f64_lossy(),
                    mae: m.mae.to_f64_lossy(),
                    rmse: m.rmse.to_f64_lossy(),
                },
                imp.into_iter().map(|(mean, _)| mean.to_f64_lossy()).collect(),
            ))
        })
        .collect::<Result<_>>()?;

    let importance = names
        .iter()
        .enumerate()
        .map(|(f, name)| {
            let vals: Vec<f64> = per_split.iter().map(|(_, imp)| imp[f]).collect();
            let (mean, std) = mean_std(&vals);
            (name.clone(), MeanStd { mean, std })
        })
        .collect();
    let metrics = MetricsSummary::from_splits(per_split.into_iter().map(|(m, _)| m).collect());
    Ok(ModelEvaluation { model: config.name().to_string(), metrics, importance })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Derived,
    Imported,
}

/// Nonnegative per-feature similarity weights keyed by schema feature name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub weights: IndexMap<String, f64>,
    pub provenance: Provenance,
}

impl WeightVector {
    pub fn new(weights: IndexMap<String, f64>, provenance: Provenance) -> Result<Self> {
        if let Some((k, _)) = weights.iter().find(|(_, &w)| !(w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidConfig(format!("weight of `{k}` must be finite and >= 0")));
        }
        if !weights.values().any(|&w| w > 0.0) {
            return Err(Error::NoPositiveWeight);
        }
        Ok(Self { weights, provenance })
    }

    /// Rescales so the weights sum to one.
    pub fn normalized(mut self) -> Self {
        let total: f64 = self.weights.values().sum();
        for w in self.weights.values_mut() {
            *w /= total;
        }
        self
    }

    /// Weight of a feature; features absent from the vector weigh zero.
    pub fn get(&self, name: &str) -> f64 {
        self.weights.get(name).copied().unwrap_or(0.0)
    }
}

/// Feature-wise arithmetic mean of per-model mean importances over the
/// selected models, before any clamping or folding.
pub fn average_columns(
    per_model: &IndexMap<String, IndexMap<String, MeanStd>>,
    models: &[String],
) -> Result<IndexMap<String, f64>> {
    let first = models.first().ok_or_else(|| Error::FeatureSetMismatch("no models selected".into()))?;
    let reference =
        per_model.get(first).ok_or_else(|| Error::FeatureSetMismatch(format!("unknown model `{first}`")))?;
    for m in models {
        let table = per_model.get(m).ok_or_else(|| Error::FeatureSetMismatch(format!("unknown model `{m}`")))?;
        if table.len() != reference.len() || table.keys().any(|k| !reference.contains_key(k)) {
            return Err(Error::FeatureSetMismatch(format!("`{m}` differs from `{first}`")));
        }
    }
    let k = models.len() as f64;
    Ok(reference
        .keys()
        .map(|f| {
            let s: f64 = models.iter().map(|m| per_model[m][f].mean).sum();
            (f.clone(), s / k)
        })
        .collect())
}

/// Clamps negative importances to zero, sums indicator columns into their
/// parent feature (`parents` maps column -> feature; unmapped columns are
/// their own parent) and renormalizes to sum one.
pub fn fold_weights(columns: &IndexMap<String, f64>, parents: &IndexMap<String, String>) -> Result<WeightVector> {
    let mut folded: IndexMap<String, f64> = IndexMap::new();
    for (col, &v) in columns {
        let parent = parents.get(col).unwrap_or(col);
        let v = if v > 0.0 { v } else { 0.0 };
        *folded.entry(parent.clone()).or_insert(0.0) += v;
    }
    Ok(WeightVector::new(folded, Provenance::Derived)?.normalized())
}

/// Cross-model average turned into similarity weights.
pub fn average_importance(
    per_model: &IndexMap<String, IndexMap<String, MeanStd>>,
    models: &[String],
    parents: &IndexMap<String, String>,
) -> Result<WeightVector> {
    fold_weights(&average_columns(per_model, models)?, parents)
}

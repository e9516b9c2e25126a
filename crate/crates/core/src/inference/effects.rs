//! Standardized mean differences between each cluster and the rest.

use std::cmp::Ordering;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::dataset::ScaledTable;
use crate::error::{Error, Result};
use crate::scalar::{mean, Scalar};

/// Cohen's d of `inside` against `outside` with the pooled sample SD.
///
/// Zero pooled variance yields `+inf`/`-inf` when the means differ and
/// `0` when they agree.
pub fn cohens_d<T: Scalar>(inside: &[T], outside: &[T]) -> Result<T> {
    for side in [inside, outside] {
        if side.len() < 2 {
            return Err(Error::InsufficientSamples { needed: 2, found: side.len() });
        }
    }
    let (m1, m2) = (mean(inside), mean(outside));
    let ss = |xs: &[T], m: T| xs.iter().map(|&x| (x - m) * (x - m)).sum::<T>();
    let dof = T::from_usize_lossy(inside.len() + outside.len() - 2);
    let pooled = ((ss(inside, m1) + ss(outside, m2)) / dof).sqrt();
    let diff = m1 - m2;
    if pooled > T::zero() {
        Ok(diff / pooled)
    } else if diff > T::zero() {
        Ok(T::infinity())
    } else if diff < T::zero() {
        Ok(T::neg_infinity())
    } else {
        Ok(T::zero())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEffects {
    pub cluster: usize,
    /// d per design column; NaN when either side has fewer than two rows.
    #[serde(with = "crate::float_serde::map")]
    pub d: IndexMap<String, f64>,
    #[serde(with = "crate::float_serde::pairs")]
    pub top: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectProfile {
    pub features: Vec<String>,
    pub clusters: Vec<ClusterEffects>,
}

impl EffectProfile {
    pub fn cluster(&self, label: usize) -> Option<&ClusterEffects> {
        self.clusters.iter().find(|c| c.cluster == label)
    }
}

/// Orders by descending |d| with NaN last, then by name.
fn rank_order(a: &(String, f64), b: &(String, f64)) -> Ordering {
    match (a.1.is_nan(), b.1.is_nan()) {
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        _ => b.1.abs().total_cmp(&a.1.abs()).then_with(|| a.0.cmp(&b.0)),
    }
}

/// Top `m` entries of `d`, ranked by |d|.
pub fn top_features(d: &IndexMap<String, f64>, m: usize) -> Vec<(String, f64)> {
    let mut all: Vec<(String, f64)> = d.iter().map(|(k, &v)| (k.clone(), v)).collect();
    all.sort_by(rank_order);
    all.truncate(m);
    all
}

/// Effect sizes of every design column (scaled numerics and 0/1 level
/// indicators) for each cluster against all other clustered rows.
///
/// `clusters` holds (label, member rows); rows outside every cluster are
/// ignored.
pub fn effect_profile(table: &ScaledTable, clusters: &[(usize, Vec<usize>)], m: usize) -> Result<EffectProfile> {
    if clusters.len() < 2 {
        return Err(Error::DegenerateGroups(format!("{} cluster(s); need at least 2", clusters.len())));
    }
    let design = table.design_matrix();
    let mut out = Vec::with_capacity(clusters.len());
    for (label, members) in clusters {
        let rest: Vec<usize> =
            clusters.iter().filter(|(l, _)| l != label).flat_map(|(_, rows)| rows.iter().copied()).collect();
        let mut d = IndexMap::new();
        for (c, name) in design.names.iter().enumerate() {
            let inside: Vec<f64> = members.iter().map(|&r| design.rows[r][c]).collect();
            let outside: Vec<f64> = rest.iter().map(|&r| design.rows[r][c]).collect();
            let value = match cohens_d(&inside, &outside) {
                Ok(v) => v,
                Err(Error::InsufficientSamples { .. }) => f64::NAN,
                Err(e) => return Err(e),
            };
            d.insert(name.clone(), value);
        }
        let top = top_features(&d, m);
        out.push(ClusterEffects { cluster: *label, d, top });
    }
    Ok(EffectProfile { features: design.names, clusters: out })
}

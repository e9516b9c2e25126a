//! Effect sizes laid out along the cluster ordering, with rank trends.

use serde::{Deserialize, Serialize};

use super::effects::EffectProfile;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendTable {
    pub features: Vec<String>,
    pub clusters: Vec<usize>,
    /// `values[f][c]`: d of feature `f` in `clusters[c]`.
    #[serde(with = "crate::float_serde::nested")]
    pub values: Vec<Vec<f64>>,
    /// Spearman correlation of cluster position against d, per feature.
    #[serde(with = "crate::float_serde::vec")]
    pub spearman: Vec<f64>,
}

/// Average ranks (1-based), ties sharing the mean of their positions.
pub fn average_ranks<T: Scalar>(xs: &[T]) -> Vec<T> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut ranks = vec![T::zero(); xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = T::from_usize_lossy(i + j + 2) / T::lit(2.0);
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Pearson correlation of the average ranks. Zero when either side is
/// constant or has fewer than two finite points.
pub fn spearman<T: Scalar>(x: &[T], y: &[T]) -> T {
    let (x, y): (Vec<T>, Vec<T>) =
        x.iter().zip(y).filter(|(a, b)| !a.is_nan() && !b.is_nan()).map(|(a, b)| (*a, *b)).unzip();
    if x.len() < 2 {
        return T::zero();
    }
    let (rx, ry) = (average_ranks(&x), average_ranks(&y));
    let n = T::from_usize_lossy(x.len());
    let (mx, my) = (rx.iter().copied().sum::<T>() / n, ry.iter().copied().sum::<T>() / n);
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    let mut syy = T::zero();
    for (a, b) in rx.iter().zip(&ry) {
        sxy = sxy + (*a - mx) * (*b - my);
        sxx = sxx + (*a - mx) * (*a - mx);
        syy = syy + (*b - my) * (*b - my);
    }
    if sxx <= T::zero() || syy <= T::zero() {
        return T::zero();
    }
    sxy / (sxx * syy).sqrt()
}

/// Lays out `profile` along `ordering`, the cluster labels from highest to
/// lowest target median.
pub fn trend_table(profile: &EffectProfile, ordering: &[usize]) -> Result<TrendTable> {
    let mut columns = Vec::with_capacity(ordering.len());
    for &label in ordering {
        columns.push(
            profile.cluster(label).ok_or_else(|| Error::InvalidPartition(format!("cluster {label} has no profile")))?,
        );
    }
    if columns.len() != profile.clusters.len() {
        return Err(Error::InvalidPartition("ordering does not cover every profiled cluster".into()));
    }
    let position: Vec<f64> = (1..=ordering.len()).map(|p| p as f64).collect();
    let mut values = Vec::with_capacity(profile.features.len());
    let mut rho = Vec::with_capacity(profile.features.len());
    for name in &profile.features {
        let row: Vec<f64> = columns.iter().map(|c| c.d[name]).collect();
        rho.push(spearman(&position, &row));
        values.push(row);
    }
    Ok(TrendTable { features: profile.features.clone(), clusters: ordering.to_vec(), values, spearman: rho })
}

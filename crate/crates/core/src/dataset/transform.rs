//! Column-level transforms: rate normalization, min-max scaling, one-hot
//! encoding and quantile binning.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Events per 10,000 population.
pub fn normalize_target<T: Scalar>(count: T, population: T) -> Result<T> {
    if !(population > T::zero()) {
        return Err(Error::NonpositivePopulation);
    }
    Ok(count / population * T::lit(10_000.0))
}

/// Maps a column onto [0, 1]. A constant column maps to all zeros.
/// Returns the scaled column together with the original min and max.
pub fn scale_minmax<T: Scalar>(column: &[T]) -> Result<(Vec<T>, T, T)> {
    if column.is_empty() {
        return Err(Error::EmptyColumn);
    }
    let (lo, hi) = column.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let range = hi - lo;
    let scaled = if range > T::zero() {
        column.iter().map(|&x| ((x - lo) / range).max(T::zero()).min(T::one())).collect()
    } else {
        vec![T::zero(); column.len()]
    };
    Ok((scaled, lo, hi))
}

/// Applies previously fitted scale parameters to one value.
pub fn apply_minmax<T: Scalar>(x: T, min: T, max: T) -> T {
    let range = max - min;
    if range > T::zero() {
        (x - min) / range
    } else {
        T::zero()
    }
}

pub fn unscale_minmax<T: Scalar>(x: T, min: T, max: T) -> T {
    x * (max - min) + min
}

/// Sorted unique labels; this is the frozen one-hot level order.
pub fn sorted_categories(column: &[String]) -> Vec<String> {
    column.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Position of each cell's label within `categories`.
pub fn encode_categories(column: &[String], categories: &[String]) -> Result<Vec<usize>> {
    column
        .iter()
        .map(|cell| categories.iter().position(|c| c == cell).ok_or_else(|| Error::UnknownCategory(cell.clone())))
        .collect()
}

/// One indicator column per category, in the order given.
pub fn one_hot<T: Scalar>(column: &[String], categories: &[String]) -> Result<Vec<Vec<T>>> {
    let codes = encode_categories(column, categories)?;
    Ok((0..categories.len())
        .map(|k| codes.iter().map(|&c| if c == k { T::one() } else { T::zero() }).collect())
        .collect())
}

/// Linear-interpolation quantile of an already sorted slice.
fn quantile_sorted<T: Scalar>(sorted: &[T], q: f64) -> T {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let frac = T::lit(h - lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Assigns each value to a quantile bin.
///
/// Edges sit at the empirical quantiles `i / max_bins`; duplicate edges are
/// merged and empty bins are dropped, so the realized bin count can be
/// smaller than `max_bins`. Labels are dense from 0 and nondecreasing in the
/// value. The lowest bin is closed on the left; every other bin is `(lo, hi]`.
pub fn quantile_bins<T: Scalar>(target: &[T], max_bins: usize) -> Result<Vec<usize>> {
    if target.is_empty() {
        return Err(Error::EmptyColumn);
    }
    let max_bins = max_bins.max(1);
    let mut sorted = target.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let mut edges: Vec<T> = (0..=max_bins).map(|i| quantile_sorted(&sorted, i as f64 / max_bins as f64)).collect();
    edges.dedup();
    if edges.len() < 2 {
        return Ok(vec![0; target.len()]);
    }

    // Interior edges only; x belongs to the first bin whose upper edge is >= x.
    let interior = &edges[1..edges.len().saturating_sub(1)];
    let raw: Vec<usize> = target.iter().map(|&x| interior.iter().take_while(|&&e| x > e).count()).collect();

    let n_raw = interior.len() + 1;
    let mut used = vec![false; n_raw];
    for &b in &raw {
        used[b] = true;
    }
    let mut dense = vec![0usize; n_raw];
    let mut next = 0;
    for (b, &u) in used.iter().enumerate() {
        dense[b] = next;
        if u {
            next += 1;
        }
    }
    Ok(raw.into_iter().map(|b| dense[b]).collect())
}

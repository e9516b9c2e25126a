//! Weighted Gower dissimilarity over mixed numeric and categorical features.

use rayon::prelude::*;

use super::matrix::{DissimilarityMatrix, SymMatrix};
use crate::dataset::{FeatureValues, ScaledTable};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::weights::WeightVector;

/// One cell of a mixed-type row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell<T> {
    Num(T),
    Cat(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GowerValues<T> {
    Numeric(Vec<T>),
    Categorical(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GowerColumn<T> {
    pub name: String,
    pub weight: T,
    pub values: GowerValues<T>,
}

/// Column-major mixed table with one weight per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct GowerInput<T> {
    pub n: usize,
    pub columns: Vec<GowerColumn<T>>,
}

/// Range `max - min` of every numeric feature over the whole table;
/// `None` for categorical features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanges<T>(pub Vec<Option<T>>);

impl<T: Scalar> GowerInput<T> {
    pub fn new(columns: Vec<GowerColumn<T>>) -> Result<Self> {
        let n = columns.first().map_or(0, |c| match &c.values {
            GowerValues::Numeric(v) => v.len(),
            GowerValues::Categorical(v) => v.len(),
        });
        for c in &columns {
            let len = match &c.values {
                GowerValues::Numeric(v) => v.len(),
                GowerValues::Categorical(v) => v.len(),
            };
            if len != n {
                return Err(Error::LengthMismatch { expected: n, found: len });
            }
            if !(c.weight >= T::zero()) {
                return Err(Error::InvalidConfig(format!("negative weight for `{}`", c.name)));
            }
        }
        Ok(Self { n, columns })
    }

    pub fn ranges(&self) -> FeatureRanges<T> {
        FeatureRanges(
            self.columns
                .iter()
                .map(|c| match &c.values {
                    GowerValues::Numeric(v) => {
                        let (lo, hi) =
                            v.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| (lo.min(x), hi.max(x)));
                        Some(if v.is_empty() { T::zero() } else { hi - lo })
                    }
                    GowerValues::Categorical(_) => None,
                })
                .collect(),
        )
    }

    pub fn weights(&self) -> Vec<T> {
        self.columns.iter().map(|c| c.weight).collect()
    }

    pub fn row(&self, i: usize) -> Vec<Cell<T>> {
        self.columns
            .iter()
            .map(|c| match &c.values {
                GowerValues::Numeric(v) => Cell::Num(v[i]),
                GowerValues::Categorical(v) => Cell::Cat(v[i]),
            })
            .collect()
    }
}

#[inline]
fn numeric_term<T: Scalar>(a: T, b: T, range: T) -> T {
    if range > T::zero() {
        (a - b).abs() / range
    } else {
        T::zero()
    }
}

#[inline]
fn finish<T: Scalar>(numer: T, total: T) -> T {
    (numer / total).min(T::one())
}

fn total_weight<T: Scalar>(weights: &[T]) -> Result<T> {
    let total = weights.iter().copied().sum::<T>();
    if total > T::zero() {
        Ok(total)
    } else {
        Err(Error::ZeroTotalWeight)
    }
}

/// Dissimilarity of two rows. Numeric features with zero range contribute
/// nothing, but their weight still counts in the denominator.
pub fn gower_pair<T: Scalar>(
    row_i: &[Cell<T>],
    row_j: &[Cell<T>],
    weights: &[T],
    ranges: &FeatureRanges<T>,
) -> Result<T> {
    if row_i.len() != weights.len() || row_j.len() != weights.len() || ranges.0.len() != weights.len() {
        return Err(Error::LengthMismatch { expected: weights.len(), found: row_i.len() });
    }
    let total = total_weight(weights)?;
    let mut numer = T::zero();
    for (f, (&w, (a, b))) in weights.iter().zip(row_i.iter().zip(row_j)).enumerate() {
        let term = match (a, b, ranges.0[f]) {
            (Cell::Num(a), Cell::Num(b), Some(r)) => numeric_term(*a, *b, r),
            (Cell::Cat(a), Cell::Cat(b), None) => {
                if a == b {
                    T::zero()
                } else {
                    T::one()
                }
            }
            _ => return Err(Error::InvalidConfig(format!("feature {f} has mixed cell kinds"))),
        };
        numer = numer + w * term;
    }
    Ok(finish(numer, total))
}

/// Full dissimilarity matrix. Rows are computed in parallel; every entry is
/// evaluated by the same sequential sum over features, so the result does
/// not depend on scheduling.
pub fn gower_matrix_from<T: Scalar>(input: &GowerInput<T>) -> Result<DissimilarityMatrix<T>> {
    let weights = input.weights();
    let total = total_weight(&weights)?;
    let ranges = input.ranges();
    let n = input.n;
    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| {
                    let mut numer = T::zero();
                    for (c, r) in input.columns.iter().zip(&ranges.0) {
                        let term = match (&c.values, r) {
                            (GowerValues::Numeric(v), Some(r)) => numeric_term(v[i], v[j], *r),
                            (GowerValues::Categorical(v), _) => {
                                if v[i] == v[j] {
                                    T::zero()
                                } else {
                                    T::one()
                                }
                            }
                            (GowerValues::Numeric(_), None) => unreachable!("numeric range always computed"),
                        };
                        numer = numer + c.weight * term;
                    }
                    finish(numer, total)
                })
                .collect()
        })
        .collect();
    let mut m = SymMatrix::zeros(n);
    for (i, row) in rows.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            m.set(i, i + 1 + k, v);
        }
    }
    Ok(DissimilarityMatrix(m))
}

/// Builds the Gower input from a prepared table. A feature's effective
/// weight is its schema weight times its entry in `weights`; categorical
/// features enter once with the mismatch indicator.
pub fn gower_input(table: &ScaledTable, weights: &WeightVector) -> Result<GowerInput<f64>> {
    for k in weights.weights.keys() {
        if table.feature(k).is_none() {
            return Err(Error::FeatureSetMismatch(format!("weight for unknown feature `{k}`")));
        }
    }
    let columns = table
        .features
        .iter()
        .map(|f| GowerColumn {
            name: f.name.clone(),
            weight: f.weight * weights.get(&f.name),
            values: match &f.values {
                FeatureValues::Numeric(v) => GowerValues::Numeric(v.clone()),
                FeatureValues::Categorical(v) => GowerValues::Categorical(v.clone()),
            },
        })
        .collect();
    GowerInput::new(columns)
}

pub fn gower_matrix(table: &ScaledTable, weights: &WeightVector) -> Result<DissimilarityMatrix<f64>> {
    if table.n_rows() < 2 {
        return Err(Error::InvalidConfig("Gower matrix needs at least two rows".into()));
    }
    gower_matrix_from(&gower_input(table, weights)?)
}

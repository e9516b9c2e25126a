use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::Regressor;
use super::tree::{RegressionTree, TreeParams};
use crate::error::{Error, Result};
use crate::rng::rng_at;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Fraction of features examined at each split.
    pub feature_fraction: f64,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self { n_trees: 100, max_depth: 8, min_leaf: 2, feature_fraction: 0.5, bootstrap: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbrtParams {
    pub n_stages: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Row fraction drawn without replacement per stage; 1 uses every row.
    pub subsample: f64,
}

impl Default for GbrtParams {
    fn default() -> Self {
        Self { n_stages: 100, learning_rate: 0.1, max_depth: 3, min_leaf: 2, subsample: 1.0 }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 || self.min_leaf == 0 {
            return Err(Error::InvalidModel("forest needs n_trees >= 1 and min_leaf >= 1".into()));
        }
        if !(self.feature_fraction > 0.0 && self.feature_fraction <= 1.0) {
            return Err(Error::InvalidModel("feature_fraction must be in (0, 1]".into()));
        }
        Ok(())
    }
}

impl GbrtParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_stages == 0 || self.min_leaf == 0 {
            return Err(Error::InvalidModel("gbrt needs n_stages >= 1 and min_leaf >= 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::InvalidModel("learning_rate must be in (0, 1]".into()));
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return Err(Error::InvalidModel("subsample must be in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Bagged regression trees; prediction is the mean over trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest<T> {
    pub trees: Vec<RegressionTree<T>>,
}

/// Gradient boosting on squared loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gbrt<T> {
    pub init: T,
    pub learning_rate: T,
    pub stages: Vec<RegressionTree<T>>,
}

fn check_shape<T>(x: &[Vec<T>], y: &[T]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: y.len(), found: x.len() });
    }
    if y.is_empty() {
        return Err(Error::InvalidModel("no training rows".into()));
    }
    Ok(())
}

/// Each tree draws its bootstrap sample and split features from its own
/// substream `(seed, tree index)`.
pub fn fit_forest<T: Scalar>(x: &[Vec<T>], y: &[T], params: &ForestParams, seed: u64) -> Result<Forest<T>> {
    params.validate()?;
    check_shape(x, y)?;
    let n = y.len();
    let p = x[0].len();
    let max_features = ((params.feature_fraction * p as f64).ceil() as usize).clamp(1, p.max(1));
    let tree_params =
        TreeParams { max_depth: params.max_depth, min_leaf: params.min_leaf, max_features: Some(max_features) };
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_at(seed, &[t as u64]);
            let rows: Vec<usize> =
                if params.bootstrap { (0..n).map(|_| rng.gen_range(0..n)).collect() } else { (0..n).collect() };
            RegressionTree::fit(x, y, &rows, &tree_params, &mut rng)
        })
        .collect();
    Ok(Forest { trees })
}

pub fn fit_gbrt<T: Scalar>(x: &[Vec<T>], y: &[T], params: &GbrtParams, seed: u64) -> Result<Gbrt<T>> {
    params.validate()?;
    check_shape(x, y)?;
    let n = y.len();
    let init = y.iter().copied().sum::<T>() / T::from_usize_lossy(n);
    let lr = T::lit(params.learning_rate);
    let tree_params = TreeParams { max_depth: params.max_depth, min_leaf: params.min_leaf, max_features: None };
    let take = ((params.subsample * n as f64).round() as usize).clamp(1, n);

    let mut fitted = vec![init; n];
    let mut stages = Vec::with_capacity(params.n_stages);
    for stage in 0..params.n_stages {
        let mut rng = rng_at(seed, &[stage as u64]);
        let residual: Vec<T> = y.iter().zip(&fitted).map(|(&a, &b)| a - b).collect();
        let mut rows: Vec<usize> =
            if take < n { rand::seq::index::sample(&mut rng, n, take).into_vec() } else { (0..n).collect() };
        rows.sort_unstable();
        let tree = RegressionTree::fit(x, &residual, &rows, &tree_params, &mut rng);
        for (f, row) in fitted.iter_mut().zip(x) {
            *f = *f + lr * tree.predict_row(row);
        }
        stages.push(tree);
    }
    Ok(Gbrt { init, learning_rate: lr, stages })
}

impl<T: Scalar> Regressor<T> for Forest<T> {
    fn predict_row(&self, row: &[T]) -> T {
        let s: T = self.trees.iter().map(|t| t.predict_row(row)).sum();
        s / T::from_usize_lossy(self.trees.len())
    }
}

impl<T: Scalar> Regressor<T> for Gbrt<T> {
    fn predict_row(&self, row: &[T]) -> T {
        self.stages.iter().fold(self.init, |acc, t| acc + self.learning_rate * t.predict_row(row))
    }
}

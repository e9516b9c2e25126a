use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dataset::quantile_bins;
use crate::error::{Error, Result};
use crate::rng::rng_at;
use crate::scalar::Scalar;

/// Repeated stratified k-fold plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvPlan {
    pub folds: usize,
    pub repeats: usize,
    pub max_bins: usize,
    pub seed: u64,
}

impl Default for CvPlan {
    fn default() -> Self {
        Self { folds: 5, repeats: 5, max_bins: 10, seed: 0 }
    }
}

impl CvPlan {
    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 || self.repeats < 1 || self.max_bins < 1 {
            return Err(Error::InvalidConfig(format!(
                "cv plan needs folds >= 2, repeats >= 1, max_bins >= 1 (got {self:?})"
            )));
        }
        Ok(())
    }

    pub fn total_splits(&self) -> usize {
        self.folds * self.repeats
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub repeat: usize,
    pub fold: usize,
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Stratifies on quantile bins of `target` and returns `folds * repeats`
/// splits ordered by (repeat, fold).
pub fn make_splits<T: Scalar>(target: &[T], plan: &CvPlan) -> Result<Vec<Split>> {
    plan.validate()?;
    if target.len() < plan.folds {
        return Err(Error::TooFewRows { rows: target.len(), folds: plan.folds });
    }
    let bins = quantile_bins(target, plan.max_bins)?;
    stratified_splits(&bins, plan)
}

/// Splits from precomputed stratum labels. Within each repeat rows are
/// shuffled, grouped by stratum, and dealt to folds round-robin, so every
/// stratum's per-fold count is within one of its even share.
pub fn stratified_splits(strata: &[usize], plan: &CvPlan) -> Result<Vec<Split>> {
    plan.validate()?;
    let n = strata.len();
    if n < plan.folds {
        return Err(Error::TooFewRows { rows: n, folds: plan.folds });
    }
    let mut splits = Vec::with_capacity(plan.total_splits());
    for repeat in 0..plan.repeats {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng_at(plan.seed, &[repeat as u64]));
        order.sort_by_key(|&i| strata[i]);
        let mut fold_of = vec![0usize; n];
        for (pos, &i) in order.iter().enumerate() {
            fold_of[i] = pos % plan.folds;
        }
        for fold in 0..plan.folds {
            let (validation, train): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| fold_of[i] == fold);
            splits.push(Split { repeat, fold, train, validation });
        }
    }
    Ok(splits)
}

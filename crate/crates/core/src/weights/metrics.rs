use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics<T> {
    pub r2: T,
    pub mae: T,
    pub rmse: T,
}

fn check<T>(y_true: &[T], y_pred: &[T]) -> Result<()> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch { expected: y_true.len(), found: y_pred.len() });
    }
    if y_true.is_empty() {
        return Err(Error::EmptyColumn);
    }
    Ok(())
}

/// Coefficient of determination `1 - SS_res / SS_tot`.
pub fn r2_score<T: Scalar>(y_true: &[T], y_pred: &[T]) -> Result<T> {
    check(y_true, y_pred)?;
    let mean = y_true.iter().copied().sum::<T>() / T::from_usize_lossy(y_true.len());
    let ss_tot: T = y_true.iter().map(|&y| (y - mean) * (y - mean)).sum();
    if ss_tot == T::zero() {
        return Err(Error::ZeroVarianceTruth);
    }
    let ss_res: T = y_true.iter().zip(y_pred).map(|(&y, &p)| (y - p) * (y - p)).sum();
    Ok(T::one() - ss_res / ss_tot)
}

pub fn metrics<T: Scalar>(y_true: &[T], y_pred: &[T]) -> Result<Metrics<T>> {
    let r2 = r2_score(y_true, y_pred)?;
    let n = T::from_usize_lossy(y_true.len());
    let mae = y_true.iter().zip(y_pred).map(|(&y, &p)| (y - p).abs()).sum::<T>() / n;
    let mse = y_true.iter().zip(y_pred).map(|(&y, &p)| (y - p) * (y - p)).sum::<T>() / n;
    Ok(Metrics { r2, mae, rmse: mse.sqrt() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitMetrics {
    pub repeat: usize,
    pub fold: usize,
    pub r2: f64,
    pub mae: f64,
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub splits: Vec<SplitMetrics>,
    pub mean: Metrics<f64>,
    pub std: Metrics<f64>,
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl MetricsSummary {
    pub fn from_splits(splits: Vec<SplitMetrics>) -> Self {
        let pick = |f: fn(&SplitMetrics) -> f64| mean_std(&splits.iter().map(f).collect::<Vec<_>>());
        let (r2, r2s) = pick(|s| s.r2);
        let (mae, maes) = pick(|s| s.mae);
        let (rmse, rmses) = pick(|s| s.rmse);
        Self { splits, mean: Metrics { r2, mae, rmse }, std: Metrics { r2: r2s, mae: maes, rmse: rmses } }
    }
}

use serde::{Deserialize, Serialize};

use super::model::Regressor;
use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel<T> {
    pub coefficients: Vec<T>,
    pub intercept: T,
}

/// Minimizes `||y - X b - c||^2 + lambda ||b||^2` with an unpenalized
/// intercept `c`, by solving the centered normal equations.
pub fn fit_ridge<T: Scalar>(x: &[Vec<T>], y: &[T], lambda: T) -> Result<RidgeModel<T>> {
    let n = y.len();
    if x.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: x.len() });
    }
    let p = x.first().map_or(0, Vec::len);
    if n == 0 || p == 0 {
        return Err(Error::InvalidModel("ridge needs at least one row and one column".into()));
    }
    if x.iter().any(|r| r.len() != p) {
        return Err(Error::InvalidModel("ragged design matrix".into()));
    }
    if !(lambda >= T::zero()) {
        return Err(Error::InvalidModel("lambda must be nonnegative".into()));
    }
    let nf = T::from_usize_lossy(n);
    let x_mean: Vec<T> = (0..p).map(|j| x.iter().map(|r| r[j]).sum::<T>() / nf).collect();
    let y_mean = y.iter().copied().sum::<T>() / nf;

    let mut gram = vec![vec![T::zero(); p]; p];
    let mut rhs = vec![T::zero(); p];
    for (row, &yi) in x.iter().zip(y) {
        let yc = yi - y_mean;
        for a in 0..p {
            let xa = row[a] - x_mean[a];
            rhs[a] = rhs[a] + xa * yc;
            for b in a..p {
                gram[a][b] = gram[a][b] + xa * (row[b] - x_mean[b]);
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            gram[a][b] = gram[b][a];
        }
        gram[a][a] = gram[a][a] + lambda;
    }
    let coefficients = solve(gram, rhs)?;
    let intercept = coefficients.iter().zip(&x_mean).fold(y_mean, |c, (&b, &m)| c - b * m);
    Ok(RidgeModel { coefficients, intercept })
}

impl<T: Scalar> Regressor<T> for RidgeModel<T> {
    fn predict_row(&self, row: &[T]) -> T {
        self.coefficients.iter().zip(row).fold(self.intercept, |s, (&b, &x)| s + b * x)
    }
}

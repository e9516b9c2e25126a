//! Multicollinearity diagnostics over column-major feature data.

use super::metrics::r2_score;
use super::model::Regressor;
use super::ridge::fit_ridge;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn centered_ss<T: Scalar>(c: &[T]) -> T {
    let m = c.iter().copied().sum::<T>() / T::from_usize_lossy(c.len());
    c.iter().map(|&x| (x - m) * (x - m)).sum()
}

/// Variance inflation factor `1 / (1 - R^2_f)` of each column regressed by
/// ordinary least squares on all the others. Perfect collinearity (R^2 = 1 or
/// a constant column) yields `+inf`.
pub fn vif<T: Scalar>(columns: &[Vec<T>]) -> Result<Vec<T>> {
    let p = columns.len();
    if p < 2 {
        return Err(Error::InvalidConfig("VIF needs at least two features".into()));
    }
    let n = columns[0].len();
    if n < 2 || columns.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidConfig("VIF needs at least two rows of equal length".into()));
    }
    (0..p)
        .map(|f| {
            let x: Vec<Vec<T>> = (0..n).map(|i| (0..p).filter(|&j| j != f).map(|j| columns[j][i]).collect()).collect();
            let y = &columns[f];
            // Collinear predictors leave the projection well defined; a
            // vanishing ridge term recovers it.
            let model = match fit_ridge(&x, y, T::zero()) {
                Err(Error::SingularSystem) => {
                    let scale = (0..p).filter(|&j| j != f).map(|j| centered_ss(&columns[j])).fold(T::zero(), T::max);
                    if scale == T::zero() {
                        return Ok(T::infinity());
                    }
                    fit_ridge(&x, y, scale * T::lit(1e-10))?
                }
                other => other?,
            };
            let r2 = match r2_score(y, &model.predict(&x)) {
                Ok(r2) => r2,
                Err(Error::ZeroVarianceTruth) => return Ok(T::infinity()),
                Err(e) => return Err(e),
            };
            let tol = T::lit(1e-10);
            Ok(if T::one() - r2 <= tol { T::infinity() } else { T::one() / (T::one() - r2) })
        })
        .collect()
}

/// Pearson correlation matrix with a unit diagonal. Pairs involving a
/// constant column are NaN off the diagonal.
pub fn correlation_matrix<T: Scalar>(columns: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let p = columns.len();
    let n = columns.first().map_or(0, Vec::len);
    if n < 2 || columns.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidConfig("correlation needs at least two rows of equal length".into()));
    }
    let nf = T::from_usize_lossy(n);
    let centered: Vec<Vec<T>> = columns
        .iter()
        .map(|c| {
            let m = c.iter().copied().sum::<T>() / nf;
            c.iter().map(|&x| x - m).collect()
        })
        .collect();
    let norms: Vec<T> = centered.iter().map(|c| c.iter().map(|&x| x * x).sum::<T>().sqrt()).collect();
    let mut out = vec![vec![T::zero(); p]; p];
    for a in 0..p {
        out[a][a] = T::one();
        for b in a + 1..p {
            let dot: T = centered[a].iter().zip(&centered[b]).map(|(&u, &v)| u * v).sum();
            let denom = norms[a] * norms[b];
            let r = if denom > T::zero() { (dot / denom).max(-T::one()).min(T::one()) } else { T::nan() };
            out[a][b] = r;
            out[b][a] = r;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_columns_have_unit_vif() {
        let cols = vec![vec![1.0_f64, -1.0, 1.0, -1.0], vec![1.0, 1.0, -1.0, -1.0]];
        let v = vif(&cols).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duplicated_column_is_infinite() {
        let a = vec![1.0_f64, 3.0, 2.0, 5.0, 4.0];
        let v = vif(&[a.clone(), a, vec![0.0, 1.0, 0.0, 1.0, 1.0]]).unwrap();
        assert!(v[0].is_infinite() && v[1].is_infinite());
        assert!(v[2].is_finite() && v[2] >= 1.0);
    }

    #[test]
    fn vif_at_least_one() {
        let cols = vec![
            vec![1.0_f64, 2.0, 4.0, 3.0, 6.0, 5.0],
            vec![2.0, 1.0, 3.0, 5.0, 4.0, 7.0],
            vec![0.5, 0.1, 0.9, 0.3, 0.2, 0.8],
        ];
        assert!(vif(&cols).unwrap().iter().all(|&v| v >= 1.0 - 1e-12));
        assert!(vif(&cols[..1]).is_err());
    }

    #[test]
    fn correlation_basics() {
        let a = vec![1.0_f64, 2.0, 3.0, 4.0];
        let b = vec![4.0, 3.0, 2.0, 1.0];
        let c = vec![7.0; 4];
        let r = correlation_matrix(&[a, b, c]).unwrap();
        assert_eq!(r[0][0], 1.0);
        assert!((r[0][1] + 1.0).abs() < 1e-15);
        assert_eq!(r[0][1], r[1][0]);
        assert!(r[0][2].is_nan());
        assert_eq!(r[2][2], 1.0);
    }
}

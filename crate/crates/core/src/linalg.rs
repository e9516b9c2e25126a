//! Small dense solvers used by ridge regression and the VIF diagnostic.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solves `a x = b` for square `a` by Gaussian elimination with partial
/// pivoting. `a` is row-major and consumed.
pub fn solve<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Result<Vec<T>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::LengthMismatch { expected: n, found: a.len() });
    }
    let scale = a.iter().flat_map(|r| r.iter()).fold(T::zero(), |m, &x| m.max(x.abs()));
    if scale == T::zero() {
        return Err(Error::SingularSystem);
    }
    let tol = scale * T::epsilon() * T::from_usize_lossy(n.max(1)) * T::lit(16.0);

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .expect("nonempty range");
        if !(a[pivot][col].abs() > tol) {
            return Err(Error::SingularSystem);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == T::zero() {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] = a[row][k] - factor * v;
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let s = (row + 1..n).fold(b[row], |s, k| s - a[row][k] * x[k]);
        x[row] = s / a[row][row];
    }
    Ok(x)
}

/// Column-major view of row-major data.
pub fn columns<T: Scalar>(rows: &[Vec<T>]) -> Vec<Vec<T>> {
    let p = rows.first().map_or(0, Vec::len);
    (0..p).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

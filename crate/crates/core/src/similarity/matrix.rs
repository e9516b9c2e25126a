use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Dense symmetric n x n matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    /// Builds from a full square; the caller guarantees symmetry.
    pub fn from_rows(rows: &[Vec<T>]) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        let data: Vec<T> = rows.iter().flatten().copied().collect();
        let m = Self { n, data };
        m.is_symmetric().then_some(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    /// Sets both (i, j) and (j, i).
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Submatrix on the given indices, in order.
    pub fn select(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * idx.len());
        for &i in idx {
            for &j in idx {
                data.push(self.get(i, j));
            }
        }
        Self { n: idx.len(), data }
    }

    pub fn upper_triangle(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| self.get(i, j)))
    }
}

/// Weighted Gower dissimilarities: zero diagonal, entries in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissimilarityMatrix<T>(pub SymMatrix<T>);

/// `1 - D` off the diagonal, zero on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix<T>(pub SymMatrix<T>);

impl<T: Scalar> DissimilarityMatrix<T> {
    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.0.get(i, j)
    }
}

impl<T: Scalar> SimilarityMatrix<T> {
    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.0.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.0.row(i)
    }

    /// Wraps an arbitrary symmetric matrix, forcing a zero diagonal.
    pub fn from_sym(mut m: SymMatrix<T>) -> Self {
        for i in 0..m.n() {
            m.set(i, i, T::zero());
        }
        Self(m)
    }
}

pub fn to_similarity<T: Scalar>(d: &DissimilarityMatrix<T>) -> SimilarityMatrix<T> {
    let n = d.n();
    let mut s = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            s.set(i, j, T::one() - d.get(i, j));
        }
    }
    SimilarityMatrix(s)
}

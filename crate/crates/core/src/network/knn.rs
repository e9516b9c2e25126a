use std::cmp::Ordering;

use rayon::prelude::*;

use super::graph::SimilarityGraph;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::similarity::SimilarityMatrix;

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k + 1 > n {
        return Err(Error::KOutOfRange { k, max: n.saturating_sub(1) });
    }
    Ok(())
}

/// The `k` most similar other nodes of `i`, most similar first; equal
/// similarities are ordered by ascending node index.
pub fn top_k_neighbors<T: Scalar>(s: &SimilarityMatrix<T>, i: usize, k: usize) -> Result<Vec<usize>> {
    let n = s.n();
    check_k(n, k)?;
    let row = s.row(i);
    let mut cand: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    let cmp = |a: &usize, b: &usize| row[*b].partial_cmp(&row[*a]).unwrap_or(Ordering::Equal).then(a.cmp(b));
    if k < cand.len() {
        cand.select_nth_unstable_by(k - 1, cmp);
        cand.truncate(k);
    }
    cand.sort_by(cmp);
    Ok(cand)
}

/// Directed kNN lists for every node.
pub fn knn_lists<T: Scalar>(s: &SimilarityMatrix<T>, k: usize) -> Result<Vec<Vec<usize>>> {
    check_k(s.n(), k)?;
    (0..s.n()).into_par_iter().map(|i| top_k_neighbors(s, i, k)).collect()
}

/// Keeps edge {i, j} only when each endpoint is in the other's top-k list.
pub fn mutual_knn<T: Scalar>(s: &SimilarityMatrix<T>, k: usize) -> Result<SimilarityGraph<T>> {
    let lists = knn_lists(s, k)?;
    let mut sorted = lists.clone();
    for l in &mut sorted {
        l.sort_unstable();
    }
    let mut edges = Vec::new();
    for (i, l) in lists.iter().enumerate() {
        for &j in l {
            if i < j && sorted[j].binary_search(&i).is_ok() {
                edges.push((i, j, s.get(i, j)));
            }
        }
    }
    SimilarityGraph::from_edges(s.n(), edges)
}

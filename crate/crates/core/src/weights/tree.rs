//! CART regression trees grown by variance reduction.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::model::Regressor;
use crate::rng::Rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Features examined per split; `None` examines all of them.
    pub max_features: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node<T> {
    Leaf(T),
    Split { feature: usize, threshold: T, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree<T> {
    nodes: Vec<Node<T>>,
}

struct BestSplit<T> {
    feature: usize,
    threshold: T,
    score: T,
}

impl<T: Scalar> RegressionTree<T> {
    /// Grows a tree on the rows listed in `sample_rows` (repeats allowed, as
    /// produced by bootstrapping). Split candidates are scanned by ascending
    /// feature index and threshold; only a strictly better gain replaces the
    /// incumbent, so ties keep the lowest feature and threshold.
    pub fn fit(x: &[Vec<T>], y: &[T], sample_rows: &[usize], params: &TreeParams, rng: &mut Rng) -> Self {
        let mut tree = RegressionTree { nodes: Vec::new() };
        let mut rows = sample_rows.to_vec();
        tree.grow(x, y, &mut rows, 0, params, rng);
        tree
    }

    pub fn fit_all(x: &[Vec<T>], y: &[T], params: &TreeParams, rng: &mut Rng) -> Self {
        let rows: Vec<usize> = (0..y.len()).collect();
        Self::fit(x, y, &rows, params, rng)
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        fn walk<T>(nodes: &[Node<T>], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        if self.nodes.is_empty() {
            0
        } else {
            walk(&self.nodes, 0)
        }
    }

    fn grow(
        &mut self,
        x: &[Vec<T>],
        y: &[T],
        rows: &mut [usize],
        depth: usize,
        params: &TreeParams,
        rng: &mut Rng,
    ) -> usize {
        let id = self.nodes.len();
        let n = T::from_usize_lossy(rows.len());
        let sum: T = rows.iter().map(|&i| y[i]).sum();
        let mean = if rows.is_empty() { T::zero() } else { sum / n };
        self.nodes.push(Node::Leaf(mean));

        if depth >= params.max_depth || rows.len() < 2 * params.min_leaf.max(1) {
            return id;
        }
        let sum_sq: T = rows.iter().map(|&i| y[i] * y[i]).sum();
        let sse = sum_sq - sum * sum / n;
        if !(sse > T::epsilon() * sum_sq.max(T::min_positive_value())) {
            return id;
        }
        let Some(best) = best_split(x, y, rows, sum, params, rng) else {
            return id;
        };
        if !(best.score - sum * sum / n > T::zero()) {
            return id;
        }

        let mid = partition_in_place(rows, |&i| x[i][best.feature] <= best.threshold);
        let (l, r) = rows.split_at_mut(mid);
        let left = self.grow(x, y, l, depth + 1, params, rng);
        let right = self.grow(x, y, r, depth + 1, params, rng);
        self.nodes[id] = Node::Split { feature: best.feature, threshold: best.threshold, left, right };
        id
    }
}

fn partition_in_place<F: Fn(&usize) -> bool>(rows: &mut [usize], pred: F) -> usize {
    let mut k = 0;
    for i in 0..rows.len() {
        if pred(&rows[i]) {
            rows.swap(i, k);
            k += 1;
        }
    }
    k
}

fn best_split<T: Scalar>(
    x: &[Vec<T>],
    y: &[T],
    rows: &[usize],
    total: T,
    params: &TreeParams,
    rng: &mut Rng,
) -> Option<BestSplit<T>> {
    let p = x[rows[0]].len();
    let mut features: Vec<usize> = match params.max_features {
        Some(m) if m < p => sample(rng, p, m.max(1)).into_vec(),
        _ => (0..p).collect(),
    };
    features.sort_unstable();

    let n = rows.len();
    let min_leaf = params.min_leaf.max(1);
    let mut best: Option<BestSplit<T>> = None;
    let mut pairs: Vec<(T, T)> = Vec::with_capacity(n);
    for &f in &features {
        pairs.clear();
        pairs.extend(rows.iter().map(|&i| (x[i][f], y[i])));
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut left_sum = T::zero();
        for k in 0..n - 1 {
            left_sum = left_sum + pairs[k].1;
            let n_left = k + 1;
            let n_right = n - n_left;
            if n_left < min_leaf {
                continue;
            }
            if n_right < min_leaf {
                break;
            }
            let (a, b) = (pairs[k].0, pairs[k + 1].0);
            if !(a < b) {
                continue;
            }
            let right_sum = total - left_sum;
            let score = left_sum * left_sum / T::from_usize_lossy(n_left)
                + right_sum * right_sum / T::from_usize_lossy(n_right);
            if best.as_ref().is_none_or(|bs| score > bs.score) {
                let mut threshold = (a + b) / T::lit(2.0);
                if !(threshold < b) {
                    threshold = a;
                }
                best = Some(BestSplit { feature: f, threshold, score });
            }
        }
    }
    best
}

impl<T: Scalar> Regressor<T> for RegressionTree<T> {
    fn predict_row(&self, row: &[T]) -> T {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf(v) => return *v,
                Node::Split { feature, threshold, left, right } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng() -> Rng {
        Rng::seed_from_u64(1)
    }

    #[test]
    fn depth_zero_predicts_mean() {
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![f64::from(i)]).collect();
        let y = [1.0, 2.0, 3.0, 4.0, 10.0];
        let params = TreeParams { max_depth: 0, min_leaf: 1, max_features: None };
        let t = RegressionTree::fit_all(&x, &y, &params, &mut rng());
        assert_eq!(t.n_nodes(), 1);
        assert_eq!(t.predict_row(&[100.0]), 4.0);
    }

    #[test]
    fn deep_tree_interpolates_distinct_points() {
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![f64::from(i)]).collect();
        let y = [3.0, -1.0, 4.0, 1.0, 5.0];
        let params = TreeParams { max_depth: 10, min_leaf: 1, max_features: None };
        let t = RegressionTree::fit_all(&x, &y, &params, &mut rng());
        for (row, &v) in x.iter().zip(&y) {
            assert_eq!(t.predict_row(row), v);
        }
    }

    #[test]
    fn tie_prefers_lower_feature() {
        // Two identical columns: the split must use feature 0.
        let x: Vec<Vec<f64>> = (0..6).map(|i| vec![f64::from(i), f64::from(i)]).collect();
        let y = [0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let params = TreeParams { max_depth: 1, min_leaf: 1, max_features: None };
        let t = RegressionTree::fit_all(&x, &y, &params, &mut rng());
        match &t.nodes[0] {
            Node::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 2.5);
            }
            Node::Leaf(_) => panic!("expected a split"),
        }
    }

    #[test]
    fn respects_min_leaf_and_constant_target() {
        let x: Vec<Vec<f64>> = (0..6).map(|i| vec![f64::from(i)]).collect();
        let params = TreeParams { max_depth: 5, min_leaf: 3, max_features: None };
        let t = RegressionTree::fit_all(&x, &[0.0, 9.0, 0.0, 0.0, 9.0, 0.0], &params, &mut rng());
        assert!(t.depth() <= 1);
        let t = RegressionTree::fit_all(&x, &[2.0; 6], &params, &mut rng());
        assert_eq!(t.n_nodes(), 1);
    }
}

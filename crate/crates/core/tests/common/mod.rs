//! Independent reference implementations and random fixtures shared by the
//! integration tests.
#![allow(dead_code)]

use gowergraph::network::{Partition, SimilarityGraph};
use gowergraph::similarity::{GowerColumn, GowerInput, GowerValues, SimilarityMatrix, SymMatrix};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A mixed column as the oracle sees it.
#[derive(Debug, Clone)]
pub enum OracleColumn {
    Num(Vec<f64>),
    Cat(Vec<usize>),
}

/// Random mixed table with `n` rows and `p` features plus nonnegative
/// weights (at least one positive). Some numeric columns are constant.
pub fn random_mixed(r: &mut ChaCha8Rng, n: usize, p: usize) -> (Vec<OracleColumn>, Vec<f64>) {
    let mut cols = Vec::new();
    let mut weights = Vec::new();
    for _ in 0..p {
        let col = match r.gen_range(0..5) {
            0 => OracleColumn::Num(vec![r.gen_range(-3.0..3.0); n]),
            1 | 2 => OracleColumn::Num((0..n).map(|_| r.gen_range(-10.0..10.0)).collect()),
            _ => {
                let levels = r.gen_range(1..5);
                OracleColumn::Cat((0..n).map(|_| r.gen_range(0..levels)).collect())
            }
        };
        cols.push(col);
        weights.push(if r.gen_bool(0.2) { 0.0 } else { r.gen_range(0.0..5.0) });
    }
    if weights.iter().all(|&w| w == 0.0) {
        weights[0] = 1.0;
    }
    (cols, weights)
}

pub fn to_gower_input(cols: &[OracleColumn], weights: &[f64]) -> GowerInput<f64> {
    GowerInput::new(
        cols.iter()
            .zip(weights)
            .enumerate()
            .map(|(f, (c, &w))| GowerColumn {
                name: format!("f{f}"),
                weight: w,
                values: match c {
                    OracleColumn::Num(v) => GowerValues::Numeric(v.clone()),
                    OracleColumn::Cat(v) => GowerValues::Categorical(v.clone()),
                },
            })
            .collect(),
    )
    .unwrap()
}

/// Plain double loop over pairs and features.
pub fn gower_oracle(cols: &[OracleColumn], weights: &[f64]) -> Vec<Vec<f64>> {
    let n = match &cols[0] {
        OracleColumn::Num(v) => v.len(),
        OracleColumn::Cat(v) => v.len(),
    };
    let total: f64 = weights.iter().sum();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut acc = 0.0;
            for (c, &w) in cols.iter().zip(weights) {
                let term = match c {
                    OracleColumn::Num(v) => {
                        let max = v.iter().cloned().fold(f64::MIN, f64::max);
                        let min = v.iter().cloned().fold(f64::MAX, f64::min);
                        if max - min == 0.0 {
                            0.0
                        } else {
                            (v[i] - v[j]).abs() / (max - min)
                        }
                    }
                    OracleColumn::Cat(v) => f64::from(u8::from(v[i] != v[j])),
                };
                acc += w * term;
            }
            d[i][j] = acc / total;
        }
    }
    d
}

pub fn random_similarity(r: &mut ChaCha8Rng, n: usize, ties: bool) -> SimilarityMatrix<f64> {
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let v = if ties { f64::from(r.gen_range(0..4u8)) / 4.0 } else { r.gen_range(0.0..1.0) };
            m.set(i, j, v);
        }
    }
    SimilarityMatrix::from_sym(m)
}

pub fn random_graph(r: &mut ChaCha8Rng, n: usize, p: f64) -> SimilarityGraph<f64> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if r.gen_bool(p) {
                edges.push((i, j, 1.0));
            }
        }
    }
    SimilarityGraph::from_edges(n, edges).unwrap()
}

/// `Q = (1/2m) sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j)` over the dense
/// adjacency matrix.
pub fn modularity_oracle(g: &SimilarityGraph<f64>, labels: &[usize]) -> f64 {
    let n = g.n_nodes();
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j, _) in g.edges() {
        a[i][j] = 1.0;
        a[j][i] = 1.0;
    }
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `0..n` as restricted-growth label strings.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for l in 0..=max + 1 {
            cur.push(l);
            go(i + 1, n, cur, max.max(l), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        let mut cur = vec![0];
        go(1, n, &mut cur, 0, &mut out);
    }
    out
}

pub fn partition_labels(p: &Partition) -> Vec<usize> {
    p.assignment().to_vec()
}

pub fn cohens_d_oracle(a: &[f64], b: &[f64]) -> f64 {
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let var = |x: &[f64]| {
        let m = mean(x);
        x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
    };
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let pooled = (((n1 - 1.0) * var(a) + (n2 - 1.0) * var(b)) / (n1 + n2 - 2.0)).sqrt();
    (mean(a) - mean(b)) / pooled
}

/// Ridge with an unpenalized intercept through nalgebra's LU on the
/// augmented normal equations.
pub fn ridge_oracle(x: &[Vec<f64>], y: &[f64], lambda: f64) -> (Vec<f64>, f64) {
    let n = x.len();
    let p = x[0].len();
    let a = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { x[i][j - 1] });
    let yv = DVector::from_column_slice(y);
    let mut lhs = a.transpose() * &a;
    for j in 1..=p {
        lhs[(j, j)] += lambda;
    }
    let beta = lhs.lu().solve(&(a.transpose() * yv)).expect("nonsingular oracle system");
    (beta.iter().skip(1).copied().collect(), beta[0])
}

/// Pearson correlation of average ranks.
pub fn spearman_oracle(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        v.iter()
            .map(|&a| {
                let less = v.iter().filter(|&&b| b < a).count() as f64;
                let equal = v.iter().filter(|&&b| b == a).count() as f64;
                less + (equal + 1.0) / 2.0
            })
            .collect()
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum::<f64>().sqrt();
    let sy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum::<f64>().sqrt();
    cov / (sx * sy)
}

/// Deterministic four-block distance matrix used by PERMANOVA fixtures.
pub fn block_distances(n_per: usize, blocks: usize, within: f64, between: f64) -> SymMatrix<f64> {
    let n = n_per * blocks;
    let mut m = SymMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            m.set(i, j, if i / n_per == j / n_per { within } else { between });
        }
    }
    m
}

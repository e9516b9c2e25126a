//! Permutational multivariate analysis of variance on a distance matrix.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive, rng_at};
use crate::scalar::Scalar;
use crate::similarity::SymMatrix;

/// Exact enumeration replaces sampling at or below this many points...
pub const EXACT_MAX_N: usize = 10;
/// ...provided the number of distinct relabelings is at most this.
pub const EXACT_MAX_ARRANGEMENTS: u64 = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermanovaResult {
    /// `+inf` when the within-group sum of squares is zero.
    #[serde(with = "crate::float_serde")]
    pub pseudo_f: f64,
    pub p_value: f64,
    /// Relabelings evaluated (all of them when `exact`).
    pub n_permutations: usize,
    pub exact: bool,
    pub n: usize,
    pub n_groups: usize,
    pub ss_total: f64,
    pub ss_within: f64,
    pub ss_between: f64,
}

struct Design<T> {
    n: usize,
    n_groups: usize,
    /// Squared distances, row-major N x N.
    sq: Vec<T>,
    labels: Vec<usize>,
    ss_total: T,
}

impl<T: Scalar> Design<T> {
    fn new(d: &SymMatrix<T>, nodes: &[usize], groups: &[usize]) -> Result<Self> {
        if nodes.len() != groups.len() {
            return Err(Error::LengthMismatch { expected: nodes.len(), found: groups.len() });
        }
        let dense: BTreeMap<usize, usize> =
            groups.iter().copied().collect::<std::collections::BTreeSet<_>>().into_iter().zip(0..).collect();
        let labels: Vec<usize> = groups.iter().map(|g| dense[g]).collect();
        let n = nodes.len();
        let n_groups = dense.len();
        if n_groups < 2 {
            return Err(Error::DegenerateGroups(format!("{n_groups} group(s); need at least 2")));
        }
        if n <= n_groups {
            return Err(Error::DegenerateGroups("every group is a singleton; no within-group variation".into()));
        }
        let mut sq = vec![T::zero(); n * n];
        let mut total = T::zero();
        for a in 0..n {
            for b in a + 1..n {
                let v = d.get(nodes[a], nodes[b]);
                let v2 = v * v;
                sq[a * n + b] = v2;
                sq[b * n + a] = v2;
                total = total + v2;
            }
        }
        let ss_total = total / T::from_usize_lossy(n);
        Ok(Self { n, n_groups, sq, labels, ss_total })
    }

    /// Sum over same-group pairs in node order, each scaled by its group
    /// size; independent of how groups are numbered.
    fn ss_within(&self, labels: &[usize]) -> T {
        let mut sizes = vec![0usize; self.n_groups];
        for &l in labels {
            sizes[l] += 1;
        }
        let inv: Vec<T> = sizes.iter().map(|&s| T::one() / T::from_usize_lossy(s.max(1))).collect();
        let mut ss = T::zero();
        for a in 0..self.n {
            let la = labels[a];
            let row = &self.sq[a * self.n..(a + 1) * self.n];
            for b in a + 1..self.n {
                if labels[b] == la {
                    ss = ss + row[b] * inv[la];
                }
            }
        }
        ss
    }

    fn pseudo_f(&self, ss_within: T) -> T {
        let ss_between = self.ss_total - ss_within;
        let df_between = T::from_usize_lossy(self.n_groups - 1);
        let df_within = T::from_usize_lossy(self.n - self.n_groups);
        if ss_within <= T::zero() {
            return if ss_between > T::zero() { T::infinity() } else { T::nan() };
        }
        (ss_between / df_between) / (ss_within / df_within)
    }
}

fn at_least<T: Scalar>(candidate: T, observed: T) -> bool {
    if observed.is_infinite() {
        candidate == observed
    } else {
        candidate >= observed - observed.abs() * T::lit(1e-9)
    }
}

/// Number of distinct arrangements of a label multiset, saturating.
fn multinomial(sizes: &[usize]) -> u64 {
    let mut acc: u128 = 1;
    let mut placed: u128 = 0;
    for &s in sizes {
        for k in 1..=s as u128 {
            placed += 1;
            acc = acc * placed / k;
            if acc > u128::from(u64::MAX) {
                return u64::MAX;
            }
        }
    }
    acc as u64
}

/// Lexicographic next permutation; false once the last one is reached.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Global test over the points `nodes` of `d` with group labels `groups`.
///
/// Monte Carlo p is `(#{F_perm >= F_obs} + 1) / (n_perm + 1)` with the
/// `k`-th relabeling drawn from substream `(seed, k)`. Small designs
/// (see [`EXACT_MAX_N`]) are enumerated exactly instead, in which case p is
/// the share of all distinct relabelings, the observed one included, whose
/// F reaches the observed F.
pub fn permanova<T: Scalar>(
    d: &SymMatrix<T>,
    nodes: &[usize],
    groups: &[usize],
    n_perm: usize,
    seed: u64,
) -> Result<PermanovaResult> {
    run(d, nodes, groups, n_perm, seed, true)
}

/// [`permanova`] with Monte Carlo sampling regardless of design size.
pub fn permanova_sampled<T: Scalar>(
    d: &SymMatrix<T>,
    nodes: &[usize],
    groups: &[usize],
    n_perm: usize,
    seed: u64,
) -> Result<PermanovaResult> {
    run(d, nodes, groups, n_perm, seed, false)
}

fn run<T: Scalar>(
    d: &SymMatrix<T>,
    nodes: &[usize],
    groups: &[usize],
    n_perm: usize,
    seed: u64,
    allow_exact: bool,
) -> Result<PermanovaResult> {
    let design = Design::new(d, nodes, groups)?;
    let ss_within = design.ss_within(&design.labels);
    let f_obs = design.pseudo_f(ss_within);

    let mut sizes = vec![0usize; design.n_groups];
    for &l in &design.labels {
        sizes[l] += 1;
    }
    let arrangements = multinomial(&sizes);
    let exact = allow_exact && design.n <= EXACT_MAX_N && arrangements <= EXACT_MAX_ARRANGEMENTS;

    let (p_value, evaluated) = if f_obs.is_nan() {
        (1.0, 0)
    } else if exact {
        let mut labels = design.labels.clone();
        labels.sort_unstable();
        let mut hits = 0usize;
        let mut total = 0usize;
        loop {
            total += 1;
            if at_least(design.pseudo_f(design.ss_within(&labels)), f_obs) {
                hits += 1;
            }
            if !next_permutation(&mut labels) {
                break;
            }
        }
        (hits as f64 / total as f64, total)
    } else {
        let hits: usize = (0..n_perm)
            .into_par_iter()
            .map(|k| {
                let mut labels = design.labels.clone();
                labels.shuffle(&mut rng_at(seed, &[k as u64]));
                usize::from(at_least(design.pseudo_f(design.ss_within(&labels)), f_obs))
            })
            .sum();
        ((hits + 1) as f64 / (n_perm + 1) as f64, n_perm)
    };

    Ok(PermanovaResult {
        pseudo_f: f_obs.to_f64_lossy(),
        p_value,
        n_permutations: evaluated,
        exact,
        n: design.n,
        n_groups: design.n_groups,
        ss_total: design.ss_total.to_f64_lossy(),
        ss_within: ss_within.to_f64_lossy(),
        ss_between: (design.ss_total - ss_within).to_f64_lossy(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Adjustment {
    None,
    Bh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub group_a: usize,
    pub group_b: usize,
    #[serde(with = "crate::float_serde")]
    pub pseudo_f: f64,
    pub p_value: f64,
    pub p_adjusted: Option<f64>,
}

impl PairResult {
    /// The p-value used for significance decisions.
    pub fn effective_p(&self) -> f64 {
        self.p_adjusted.unwrap_or(self.p_value)
    }

    pub fn neg_log10_p(&self) -> f64 {
        -self.effective_p().log10()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseResults {
    pub pairs: Vec<PairResult>,
}

impl PairwiseResults {
    pub fn n_significant(&self, alpha: f64) -> usize {
        self.pairs.iter().filter(|p| p.effective_p() <= alpha).count()
    }

    /// Symmetric `-log10 p` matrix over `groups` (zero diagonal).
    pub fn neg_log10_matrix(&self, groups: &[usize]) -> Vec<Vec<f64>> {
        let pos = |g: usize| groups.iter().position(|&x| x == g);
        let mut m = vec![vec![0.0; groups.len()]; groups.len()];
        for p in &self.pairs {
            if let (Some(a), Some(b)) = (pos(p.group_a), pos(p.group_b)) {
                m[a][b] = p.neg_log10_p();
                m[b][a] = p.neg_log10_p();
            }
        }
        m
    }
}

/// Benjamini-Hochberg step-up adjusted p-values, in input order.
pub fn benjamini_hochberg(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let mut adjusted = vec![0.0; m];
    let mut running = f64::INFINITY;
    for (rank, &i) in order.iter().enumerate().rev() {
        let v = p[i] * (m as f64 / (rank + 1) as f64);
        running = running.min(v);
        adjusted[i] = running.min(1.0);
    }
    adjusted
}

/// PERMANOVA on every unordered pair of groups, restricted to the pair's
/// points; pair `k` (in lexicographic group order) uses seed `(seed, k)`.
pub fn pairwise_permanova<T: Scalar>(
    d: &SymMatrix<T>,
    nodes: &[usize],
    groups: &[usize],
    n_perm: usize,
    seed: u64,
    adjust: Adjustment,
) -> Result<PairwiseResults> {
    if nodes.len() != groups.len() {
        return Err(Error::LengthMismatch { expected: nodes.len(), found: groups.len() });
    }
    let ids: Vec<usize> = groups.iter().copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    if ids.len() < 2 {
        return Err(Error::DegenerateGroups(format!("{} group(s); need at least 2", ids.len())));
    }
    let pairs: Vec<(usize, usize)> =
        ids.iter().enumerate().flat_map(|(i, &a)| ids[i + 1..].iter().map(move |&b| (a, b))).collect();
    let mut results: Vec<PairResult> = pairs
        .par_iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let (sub_nodes, sub_groups): (Vec<usize>, Vec<usize>) =
                nodes.iter().zip(groups).filter(|(_, &g)| g == a || g == b).map(|(&n, &g)| (n, g)).unzip();
            let r = permanova(d, &sub_nodes, &sub_groups, n_perm, derive(seed, &[k as u64]))?;
            Ok(PairResult { group_a: a, group_b: b, pseudo_f: r.pseudo_f, p_value: r.p_value, p_adjusted: None })
        })
        .collect::<Result<_>>()?;
    if adjust == Adjustment::Bh {
        let raw: Vec<f64> = results.iter().map(|r| r.p_value).collect();
        for (r, adj) in results.iter_mut().zip(benjamini_hochberg(&raw)) {
            r.p_adjusted = Some(adj);
        }
    }
    Ok(PairwiseResults { pairs: results })
}

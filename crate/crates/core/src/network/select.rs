use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::{average_degree, degree_stats, isolate_fraction, Partition, SimilarityGraph};
use super::knn::mutual_knn;
use super::louvain::detect_communities;
use super::modularity::modularity;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::similarity::SimilarityMatrix;

/// Average-degree penalty: sparse graphs below degree 2 and graphs denser
/// than `k` are penalized linearly.
pub fn penalty_ad(ad: f64, k: usize) -> f64 {
    if ad < 2.0 {
        2.0 - ad
    } else if ad > k as f64 {
        ad - k as f64
    } else {
        0.0
    }
}

/// Isolate-fraction penalty, active above 5%.
pub fn penalty_if(isolate_fraction: f64) -> f64 {
    (isolate_fraction - 0.05).max(0.0)
}

pub fn score(modularity: f64, p_if: f64, p_ad: f64) -> f64 {
    modularity - 10.0 * p_if - p_ad
}

/// Diagnostics for one candidate K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KTrace {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "IF")]
    pub isolate_fraction: f64,
    #[serde(rename = "AD")]
    pub average_degree: f64,
    /// `-inf` when the graph has no edges.
    #[serde(rename = "Q")]
    #[serde(with = "crate::float_serde")]
    pub modularity: f64,
    #[serde(rename = "P_IF")]
    pub p_if: f64,
    #[serde(rename = "P_AD")]
    pub p_ad: f64,
    #[serde(with = "crate::float_serde")]
    pub score: f64,
    pub n_edges: usize,
    pub n_communities: usize,
}

pub struct KEvaluation<T> {
    pub trace: KTrace,
    pub graph: SimilarityGraph<T>,
    pub partition: Partition,
}

pub fn evaluate_k<T: Scalar>(s: &SimilarityMatrix<T>, k: usize, seed: u64) -> Result<KEvaluation<T>> {
    let graph = mutual_knn(s, k)?;
    let partition = detect_communities(&graph, seed);
    let isolate_fraction = isolate_fraction(&graph);
    let average_degree = average_degree(&graph);
    let modularity = match modularity(&graph, &partition) {
        Ok(q) => q,
        Err(Error::EmptyGraph) => f64::NEG_INFINITY,
        Err(e) => return Err(e),
    };
    let p_if = penalty_if(isolate_fraction);
    let p_ad = penalty_ad(average_degree, k);
    let trace = KTrace {
        k,
        isolate_fraction,
        average_degree,
        modularity,
        p_if,
        p_ad,
        score: score(modularity, p_if, p_ad),
        n_edges: graph.n_edges(),
        n_communities: partition.n_communities(),
    };
    Ok(KEvaluation { trace, graph, partition })
}

pub fn score_k<T: Scalar>(s: &SimilarityMatrix<T>, k: usize, seed: u64) -> Result<KTrace> {
    Ok(evaluate_k(s, k, seed)?.trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSelection {
    pub best_k: usize,
    pub traces: Vec<KTrace>,
}

/// Index of the highest score; ties keep the earliest (smallest K).
pub fn argmax_score(traces: &[KTrace]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, t) in traces.iter().enumerate() {
        if best.is_none_or(|b| t.score > traces[b].score) {
            best = Some(i);
        }
    }
    best
}

/// Scores every K in `k_min..=k_max` (in parallel) and returns the best.
pub fn select_k<T: Scalar>(s: &SimilarityMatrix<T>, k_min: usize, k_max: usize, seed: u64) -> Result<KSelection> {
    let max = s.n().saturating_sub(1);
    if k_min == 0 || k_min > k_max {
        return Err(Error::InvalidConfig(format!("need 1 <= k_min <= k_max (got {k_min}, {k_max})")));
    }
    if k_max > max {
        return Err(Error::KOutOfRange { k: k_max, max });
    }
    let traces: Vec<KTrace> = (k_min..=k_max).into_par_iter().map(|k| score_k(s, k, seed)).collect::<Result<_>>()?;
    let best = argmax_score(&traces).expect("nonempty sweep");
    Ok(KSelection { best_k: traces[best].k, traces })
}

/// Communities large enough for inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSet {
    /// Retained communities as (community id, sorted members), by id.
    pub clusters: Vec<(usize, Vec<usize>)>,
    /// Nodes in communities smaller than the threshold.
    pub excluded: Vec<usize>,
}

impl ClusterSet {
    pub fn n_clustered(&self) -> usize {
        self.clusters.iter().map(|(_, m)| m.len()).sum()
    }
}

pub fn finalize(partition: &Partition, min_cluster_size: usize) -> ClusterSet {
    let mut clusters = Vec::new();
    let mut excluded = Vec::new();
    for (id, members) in partition.communities() {
        if members.len() >= min_cluster_size {
            clusters.push((id, members));
        } else {
            excluded.extend(members);
        }
    }
    excluded.sort_unstable();
    ClusterSet { clusters, excluded }
}

/// Whole-graph statistics plus the same figures on the subgraph induced by
/// non-isolated nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub n_isolates: usize,
    pub isolate_fraction: f64,
    pub average_degree: f64,
    pub density: f64,
    pub induced_nodes: usize,
    pub induced_average_degree: f64,
    pub induced_density: f64,
}

pub fn summarize<T: Scalar>(g: &SimilarityGraph<T>) -> GraphSummary {
    let n_isolates = (0..g.n_nodes()).filter(|&i| g.degree(i) == 0).count();
    let (average_degree, density) = degree_stats(g.n_nodes(), g.n_edges());
    let induced_nodes = g.n_nodes() - n_isolates;
    let (induced_average_degree, induced_density) = degree_stats(induced_nodes, g.n_edges());
    GraphSummary {
        n_nodes: g.n_nodes(),
        n_edges: g.n_edges(),
        n_isolates,
        isolate_fraction: isolate_fraction(g),
        average_degree,
        density,
        induced_nodes,
        induced_average_degree,
        induced_density,
    }
}

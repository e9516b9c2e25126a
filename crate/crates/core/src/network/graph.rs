use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Undirected simple graph over nodes `0..n`, each edge annotated with the
/// similarity that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityGraph<T> {
    n: usize,
    /// Sorted by (i, j) with i < j.
    edges: Vec<(usize, usize, T)>,
    adjacency: Vec<Vec<usize>>,
}

impl<T: Scalar> SimilarityGraph<T> {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, T)>) -> Result<Self> {
        let mut list: Vec<(usize, usize, T)> = Vec::new();
        for (a, b, w) in edges {
            if a == b {
                return Err(Error::InvalidPartition(format!("self-loop on node {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidPartition(format!("edge ({a}, {b}) outside 0..{n}")));
            }
            list.push((a.min(b), a.max(b), w));
        }
        list.sort_by_key(|&(a, b, _)| (a, b));
        if list.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::InvalidPartition("parallel edges".into()));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b, _) in &list {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nb in &mut adjacency {
            nb.sort_unstable();
        }
        Ok(Self { n, edges: list, adjacency })
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize, T)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Connected-component label of every node, numbered by smallest member.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            label[start] = next;
            while let Some(u) = stack.pop() {
                for &v in &self.adjacency[u] {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

/// Share of degree-zero nodes.
pub fn isolate_fraction<T: Scalar>(g: &SimilarityGraph<T>) -> f64 {
    if g.n_nodes() == 0 {
        return 0.0;
    }
    (0..g.n_nodes()).filter(|&i| g.degree(i) == 0).count() as f64 / g.n_nodes() as f64
}

/// `2 |E| / |V|`.
pub fn average_degree<T: Scalar>(g: &SimilarityGraph<T>) -> f64 {
    degree_stats(g.n_nodes(), g.n_edges()).0
}

/// Average degree and edge density from counts.
pub fn degree_stats(n_nodes: usize, n_edges: usize) -> (f64, f64) {
    let n = n_nodes as f64;
    let m = n_edges as f64;
    let ad = if n_nodes == 0 { 0.0 } else { 2.0 * m / n };
    let density = if n_nodes < 2 { 0.0 } else { m / (n * (n - 1.0) / 2.0) };
    (ad, density)
}

/// Node-to-community labelling with ids dense from 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<usize>,
}

impl Partition {
    /// Relabels arbitrary community keys densely from 1, ordered by each
    /// community's smallest node index.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = BTreeMap::new();
        let mut next = 1;
        let assignment = labels
            .iter()
            .map(|l| {
                *map.entry(*l).or_insert_with(|| {
                    let id = next;
                    next += 1;
                    id
                })
            })
            .collect();
        Self { assignment }
    }

    pub fn singletons(n: usize) -> Self {
        Self { assignment: (1..=n).collect() }
    }

    pub fn single(n: usize) -> Self {
        Self { assignment: vec![1; n] }
    }

    pub fn n_nodes(&self) -> usize {
        self.assignment.len()
    }

    pub fn community(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn n_communities(&self) -> usize {
        self.assignment.iter().copied().max().unwrap_or(0)
    }

    /// Members of each community, keyed by id.
    pub fn communities(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (node, &c) in self.assignment.iter().enumerate() {
            out.entry(c).or_default().push(node);
        }
        out
    }
}

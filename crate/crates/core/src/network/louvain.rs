//! Deterministic Louvain-style modularity maximization.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use super::graph::{Partition, SimilarityGraph};
use super::modularity::modularity;
use crate::rng::rng_at;
use crate::scalar::Scalar;

const GAIN_EPS: f64 = 1e-10;
const MAX_PASSES: usize = 1_000;

/// Weighted graph at one aggregation level. `self_loops[i]` holds the
/// diagonal adjacency entry, so internal edges count twice.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    strength: Vec<f64>,
    two_m: f64,
}

impl Level {
    fn from_graph<T: Scalar>(g: &SimilarityGraph<T>) -> Self {
        let n = g.n_nodes();
        let adj: Vec<Vec<(usize, f64)>> = (0..n).map(|i| g.neighbors(i).iter().map(|&j| (j, 1.0)).collect()).collect();
        let strength = adj.iter().map(|a| a.len() as f64).collect();
        Self { adj, self_loops: vec![0.0; n], strength, two_m: 2.0 * g.n_edges() as f64 }
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    /// Local moving phase. Returns the community of each node and whether
    /// any node moved.
    fn local_moves(&self, order: &[usize]) -> (Vec<usize>, bool) {
        let n = self.n();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = self.strength.clone();
        let mut link = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut any_move = false;

        for _ in 0..MAX_PASSES {
            let mut moved = false;
            for &i in order {
                let ki = self.strength[i];
                if ki == 0.0 {
                    continue;
                }
                let old = comm[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if link[c] == 0.0 {
                        touched.push(c);
                    }
                    link[c] += w;
                }
                tot[old] -= ki;
                let gain = |c: usize, link: &[f64]| link[c] - ki * tot[c] / self.two_m;
                let stay = gain(old, &link);

                touched.sort_unstable();
                let mut best = old;
                let mut best_gain = f64::NEG_INFINITY;
                for &c in &touched {
                    if c == old {
                        continue;
                    }
                    let g = gain(c, &link);
                    if g > best_gain + GAIN_EPS {
                        best = c;
                        best_gain = g;
                    }
                }
                let target = if best != old && best_gain > stay + GAIN_EPS { best } else { old };

                tot[target] += ki;
                comm[i] = target;
                for &c in &touched {
                    link[c] = 0.0;
                }
                touched.clear();
                if target != old {
                    moved = true;
                    any_move = true;
                }
            }
            if !moved {
                break;
            }
        }
        (comm, any_move)
    }

    /// Collapses each community into one node. Returns the dense relabelling
    /// (ordered by first appearance) and the new level.
    fn aggregate(&self, comm: &[usize]) -> (Vec<usize>, Level) {
        let mut dense = vec![usize::MAX; self.n()];
        let mut map = BTreeMap::new();
        for (i, &c) in comm.iter().enumerate() {
            let next = map.len();
            dense[i] = *map.entry(c).or_insert(next);
        }
        let k = map.len();
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); k];
        let mut self_loops = vec![0.0; k];
        let mut strength = vec![0.0; k];
        for i in 0..self.n() {
            let ci = dense[i];
            self_loops[ci] += self.self_loops[i];
            strength[ci] += self.strength[i];
            for &(j, w) in &self.adj[i] {
                let cj = dense[j];
                if ci == cj {
                    self_loops[ci] += w;
                } else {
                    *rows[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        let adj = rows.into_iter().map(|r| r.into_iter().collect()).collect();
        (dense, Level { adj, self_loops, strength, two_m: self.two_m })
    }
}

/// Greedy modularity optimization: repeated local moves (largest positive
/// gain wins, ties go to the lowest community id) followed by aggregation,
/// until no move improves modularity. Node visit order at each level is a
/// shuffle drawn from `(seed, level)`. Isolated nodes stay singletons.
pub fn detect_communities<T: Scalar>(g: &SimilarityGraph<T>, seed: u64) -> Partition {
    let n = g.n_nodes();
    if g.n_edges() == 0 {
        return Partition::singletons(n);
    }
    let mut membership: Vec<usize> = (0..n).collect();
    let mut level = Level::from_graph(g);
    for depth in 0.. {
        let mut order: Vec<usize> = (0..level.n()).collect();
        order.shuffle(&mut rng_at(seed, &[depth as u64]));
        let (comm, moved) = level.local_moves(&order);
        if !moved {
            break;
        }
        let (dense, next) = level.aggregate(&comm);
        for m in &mut membership {
            *m = dense[*m];
        }
        let shrunk = next.n() < level.n();
        level = next;
        if !shrunk {
            break;
        }
    }
    let found = Partition::from_labels(&membership);

    // A local optimum below zero is beaten by the connected components,
    // whose modularity is never negative.
    let q = modularity(g, &found).unwrap_or(f64::NEG_INFINITY);
    if q < 0.0 {
        let comps = Partition::from_labels(&g.components());
        if modularity(g, &comps).unwrap_or(f64::NEG_INFINITY) > q {
            return comps;
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clique_edges(nodes: &[usize]) -> Vec<(usize, usize, f64)> {
        let mut e = Vec::new();
        for (a, &i) in nodes.iter().enumerate() {
            for &j in &nodes[a + 1..] {
                e.push((i, j, 1.0));
            }
        }
        e
    }

    #[test]
    fn bridged_cliques() {
        let mut edges = clique_edges(&[0, 1, 2, 3]);
        edges.extend(clique_edges(&[4, 5, 6, 7]));
        edges.push((3, 4, 1.0));
        let g = SimilarityGraph::from_edges(8, edges).unwrap();
        for seed in 0..10 {
            let p = detect_communities(&g, seed);
            assert_eq!(p.assignment(), &[1, 1, 1, 1, 2, 2, 2, 2], "seed {seed}");
        }
    }

    #[test]
    fn edge_free_pair() {
        let g = SimilarityGraph::<f64>::from_edges(2, []).unwrap();
        assert_eq!(detect_communities(&g, 0).assignment(), &[1, 2]);
    }

    #[test]
    fn disjoint_triangles() {
        let mut edges = clique_edges(&[0, 2, 4]);
        edges.extend(clique_edges(&[1, 3, 5]));
        let g = SimilarityGraph::from_edges(6, edges).unwrap();
        let p = detect_communities(&g, 3);
        assert_eq!(p.assignment(), &[1, 2, 1, 2, 1, 2]);
    }

    #[test]
    fn isolates_stay_alone() {
        let mut edges = clique_edges(&[0, 1, 2]);
        edges.push((3, 4, 1.0));
        let g = SimilarityGraph::from_edges(7, edges).unwrap();
        let p = detect_communities(&g, 1);
        let comms = p.communities();
        assert!(comms.values().any(|m| m == &vec![5]));
        assert!(comms.values().any(|m| m == &vec![6]));
    }
}

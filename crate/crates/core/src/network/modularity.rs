use super::graph::{Partition, SimilarityGraph};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Newman modularity of `partition` on the unweighted adjacency of `g`,
/// evaluated per community as `L_c / m - (d_c / 2m)^2`.
pub fn modularity<T: Scalar>(g: &SimilarityGraph<T>, partition: &Partition) -> Result<f64> {
    if partition.n_nodes() != g.n_nodes() {
        return Err(Error::InvalidPartition(format!(
            "partition has {} nodes, graph has {}",
            partition.n_nodes(),
            g.n_nodes()
        )));
    }
    let m = g.n_edges();
    if m == 0 {
        return Err(Error::EmptyGraph);
    }
    let k = partition.n_communities();
    let mut internal = vec![0usize; k + 1];
    let mut degree = vec![0usize; k + 1];
    for &(a, b, _) in g.edges() {
        let (ca, cb) = (partition.community(a), partition.community(b));
        degree[ca] += 1;
        degree[cb] += 1;
        if ca == cb {
            internal[ca] += 1;
        }
    }
    let m = m as f64;
    let two_m = 2.0 * m;
    Ok(internal
        .iter()
        .zip(&degree)
        .map(|(&l, &d)| {
            let frac = d as f64 / two_m;
            l as f64 / m - frac * frac
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_disjoint_edges() {
        // 2m = 4; each community: L/m = 1/2, (d/2m)^2 = 1/4 -> Q = 2 * 1/4 = 0.5
        let g = SimilarityGraph::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let q = modularity(&g, &Partition::from_labels(&[0, 0, 1, 1])).unwrap();
        assert_eq!(q, 0.5);
    }

    #[test]
    fn single_community_is_zero() {
        let g = SimilarityGraph::from_edges(5, [(0, 1, 1.0), (1, 2, 1.0), (2, 4, 1.0), (0, 3, 1.0)]).unwrap();
        assert_eq!(modularity(&g, &Partition::single(5)).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        let g = SimilarityGraph::<f64>::from_edges(3, []).unwrap();
        assert!(matches!(modularity(&g, &Partition::single(3)), Err(Error::EmptyGraph)));
        let g = SimilarityGraph::from_edges(3, [(0, 1, 1.0)]).unwrap();
        assert!(modularity(&g, &Partition::single(2)).is_err());
    }
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionRow {
    pub cluster: usize,
    pub size: usize,
    /// (value, count) sorted by value.
    pub counts: Vec<(String, usize)>,
}

/// Per-cluster tallies of a metadata column over the member rows.
pub fn cluster_composition(clusters: &[(usize, Vec<usize>)], metadata: &[String]) -> Vec<CompositionRow> {
    clusters
        .iter()
        .map(|(label, members)| {
            let mut counts = BTreeMap::<&str, usize>::new();
            for &r in members {
                *counts.entry(metadata[r].as_str()).or_default() += 1;
            }
            CompositionRow {
                cluster: *label,
                size: members.len(),
                counts: counts.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tallies() {
        let meta: Vec<String> = ["A", "A", "B", "C", "A"].iter().map(|s| s.to_string()).collect();
        let rows = cluster_composition(&[(1, vec![0, 1]), (2, vec![2, 3, 4])], &meta);
        assert_eq!(rows[0].counts, vec![("A".to_string(), 2)]);
        assert_eq!(rows[1].size, 3);
        assert_eq!(rows[1].counts.len(), 3);
    }
}

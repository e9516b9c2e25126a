//! Tier labels from cluster target medians, and median-based relabeling.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::median;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tier {
    #[serde(rename = "HAT")]
    High,
    #[serde(rename = "MAT")]
    Medium,
    #[serde(rename = "LAT")]
    Low,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::High => "HAT",
            Tier::Medium => "MAT",
            Tier::Low => "LAT",
        })
    }
}

pub const DEFAULT_T1: f64 = 13.0;
pub const DEFAULT_T2: f64 = 27.0;

/// `Low` below `t1`, `Medium` on `[t1, t2)`, `High` from `t2` up.
pub fn tier_of(median: f64, t1: f64, t2: f64) -> Tier {
    if median < t1 {
        Tier::Low
    } else if median < t2 {
        Tier::Medium
    } else {
        Tier::High
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierRow {
    pub cluster: usize,
    pub median: f64,
    pub tier: Tier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierAssignment {
    pub t1: f64,
    pub t2: f64,
    /// By descending median, ties by cluster label.
    pub rows: Vec<TierRow>,
}

impl TierAssignment {
    pub fn tier(&self, cluster: usize) -> Option<Tier> {
        self.rows.iter().find(|r| r.cluster == cluster).map(|r| r.tier)
    }
}

pub fn assign_tiers(medians: &[(usize, f64)], t1: f64, t2: f64) -> Result<TierAssignment> {
    if !(t1 < t2) {
        return Err(Error::BadThresholds { t1, t2 });
    }
    let mut rows: Vec<TierRow> =
        medians.iter().map(|&(cluster, m)| TierRow { cluster, median: m, tier: tier_of(m, t1, t2) }).collect();
    rows.sort_by(|a, b| b.median.total_cmp(&a.median).then(a.cluster.cmp(&b.cluster)));
    Ok(TierAssignment { t1, t2, rows })
}

/// A cluster after relabeling: `label` 1 has the highest target median.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCluster {
    pub label: usize,
    pub community: usize,
    pub members: Vec<usize>,
    pub median: f64,
}

/// Relabels communities densely from 1 by descending target median; ties
/// keep the lower community id first.
pub fn rank_by_median(clusters: &[(usize, Vec<usize>)], target: &[f64]) -> Vec<RankedCluster> {
    let mut ranked: Vec<RankedCluster> = clusters
        .iter()
        .map(|(community, members)| {
            let values: Vec<f64> = members.iter().map(|&r| target[r]).collect();
            RankedCluster { label: 0, community: *community, members: members.clone(), median: median(&values) }
        })
        .collect();
    ranked.sort_by(|a, b| b.median.total_cmp(&a.median).then(a.community.cmp(&b.community)));
    for (i, c) in ranked.iter_mut().enumerate() {
        c.label = i + 1;
    }
    ranked
}

use std::io::Write;

use super::composition::CompositionRow;
use super::effects::EffectProfile;
use super::permanova::PairwiseResults;
use super::tiers::{RankedCluster, TierAssignment};
use super::trend::TrendTable;
use crate::error::{Error, Result};

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| Error::io("<csv>", e))
}

/// Columns `i, j, F, p, p_adj, neg_log10_p`; `p_adj` is empty without an
/// adjustment.
pub fn write_pairwise<W: Write>(pairs: &PairwiseResults, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["i", "j", "F", "p", "p_adj", "neg_log10_p"])?;
    for p in &pairs.pairs {
        w.write_record([
            p.group_a.to_string(),
            p.group_b.to_string(),
            num(p.pseudo_f),
            num(p.p_value),
            p.p_adjusted.map(num).unwrap_or_default(),
            num(p.neg_log10_p()),
        ])?;
    }
    finish(w)
}

/// Every (cluster, feature) pair with its rank by |d| inside the cluster.
pub fn write_effects<W: Write>(profile: &EffectProfile, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["cluster", "feature", "d", "rank"])?;
    for c in &profile.clusters {
        let ranked = super::effects::top_features(&c.d, usize::MAX);
        for (rank, (feature, d)) in ranked.iter().enumerate() {
            w.write_record([c.cluster.to_string(), feature.clone(), num(*d), (rank + 1).to_string()])?;
        }
    }
    finish(w)
}

pub fn write_tiers<W: Write>(tiers: &TierAssignment, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["cluster", "median", "tier"])?;
    for r in &tiers.rows {
        w.write_record([r.cluster.to_string(), num(r.median), r.tier.to_string()])?;
    }
    finish(w)
}

/// One row per feature, one column per cluster in order, then `spearman`.
pub fn write_trends<W: Write>(table: &TrendTable, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["feature".to_string()];
    header.extend(table.clusters.iter().map(|c| format!("cluster_{c}")));
    header.push("spearman".into());
    w.write_record(&header)?;
    for (f, name) in table.features.iter().enumerate() {
        let mut rec = vec![name.clone()];
        rec.extend(table.values[f].iter().map(|&d| num(d)));
        rec.push(num(table.spearman[f]));
        w.write_record(&rec)?;
    }
    finish(w)
}

/// Long format: `cluster, size, value, count`.
pub fn write_composition<W: Write>(rows: &[CompositionRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["cluster", "size", "value", "count"])?;
    for r in rows {
        for (value, count) in &r.counts {
            w.write_record([r.cluster.to_string(), r.size.to_string(), value.clone(), count.to_string()])?;
        }
    }
    finish(w)
}

/// Per-row target values with their cluster label, for distribution plots.
pub fn write_clusters_target<W: Write>(
    clusters: &[RankedCluster],
    ids: &[String],
    target: &[f64],
    writer: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["id", "cluster", "community", "target"])?;
    for c in clusters {
        for &r in &c.members {
            w.write_record([ids[r].clone(), c.label.to_string(), c.community.to_string(), num(target[r])])?;
        }
    }
    finish(w)
}

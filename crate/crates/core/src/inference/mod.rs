//! Statistical characterization of clusters.

mod ari;
mod composition;
mod effects;
mod permanova;
mod report;
mod tiers;
mod trend;

pub use ari::adjusted_rand_index;
pub use composition::{cluster_composition, CompositionRow};
pub use effects::{cohens_d, effect_profile, top_features, ClusterEffects, EffectProfile};
pub use permanova::{
    benjamini_hochberg, pairwise_permanova, permanova, permanova_sampled, Adjustment, PairResult, PairwiseResults,
    PermanovaResult, EXACT_MAX_ARRANGEMENTS, EXACT_MAX_N,
};
pub use report::{write_clusters_target, write_composition, write_effects, write_pairwise, write_tiers, write_trends};
pub use tiers::{
    assign_tiers, rank_by_median, tier_of, RankedCluster, Tier, TierAssignment, TierRow, DEFAULT_T1, DEFAULT_T2,
};
pub use trend::{average_ranks, spearman, trend_table, TrendTable};

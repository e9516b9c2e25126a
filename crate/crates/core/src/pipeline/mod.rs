//! End-to-end orchestration: configuration, stages, artifacts and the
//! synthetic fixture generator.

mod artifacts;
mod config;
mod stages;
mod synth;

pub use artifacts::*;
pub use config::{PipelineConfig, WeightsSource};
pub use stages::{
    run_pipeline, run_stage, write_manifest, ClusterSummary, InferenceSummary, NetworkCluster, NetworkResult, Stage,
};
pub use synth::{generate_synthetic, SynthSpec, SyntheticData};

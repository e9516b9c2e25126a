//! Feature weights from cross-validated permutation importance, plus
//! collinearity diagnostics.

mod cv;
mod diagnostics;
mod ensemble;
mod importance;
mod io;
mod metrics;
mod model;
mod ridge;
mod tree;

pub use cv::{make_splits, stratified_splits, CvPlan, Split};
pub use diagnostics::{correlation_matrix, vif};
pub use ensemble::{fit_forest, fit_gbrt, Forest, ForestParams, Gbrt, GbrtParams};
pub use importance::{
    average_columns, average_importance, evaluate_model, fold_weights, permutation_importance, MeanStd,
    ModelEvaluation, Provenance, WeightVector,
};
pub use io::{resolve_imported, WeightsFile};
pub use metrics::{mean_std, metrics, r2_score, Metrics, MetricsSummary, SplitMetrics};
pub use model::{FittedModel, ModelConfig, Regressor};
pub use ridge::{fit_ridge, RidgeModel};
pub use tree::{RegressionTree, TreeParams};

//! Table ingestion, schema validation and feature preparation.

mod scaled;
mod schema;
mod table;
mod transform;

pub use scaled::{indicator_name, prepare, DesignMatrix, FeatureColumn, FeatureValues, PrepareOptions, ScaledTable};
pub use schema::{ColumnKind, FeatureSchema, Role, SchemaEntry};
pub use table::{load_table, read_table, Column, MissingPolicy, Table};
pub use transform::{
    apply_minmax, encode_categories, normalize_target, one_hot, quantile_bins, scale_minmax, sorted_categories,
    unscale_minmax,
};

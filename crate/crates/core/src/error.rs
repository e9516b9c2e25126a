use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("non-numeric cell `{value}` at row {row}, column `{col}`")]
    NonNumericCell { row: usize, col: String, value: String },
    #[error("missing value at row {row}, column `{col}`")]
    MissingValue { row: usize, col: String },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("population must be positive")]
    NonpositivePopulation,
    #[error("empty column")]
    EmptyColumn,
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("too few rows: {rows} rows for {folds} folds")]
    TooFewRows { rows: usize, folds: usize },
    #[error("linear system is singular")]
    SingularSystem,
    #[error("true values have zero variance; R^2 undefined")]
    ZeroVarianceTruth,
    #[error("feature sets differ between importance tables: {0}")]
    FeatureSetMismatch(String),
    #[error("no feature has a positive weight")]
    NoPositiveWeight,
    #[error("invalid model configuration: {0}")]
    InvalidModel(String),

    #[error("total feature weight is zero")]
    ZeroTotalWeight,
    #[error("K = {k} out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("partition does not cover the graph: {0}")]
    InvalidPartition(String),

    #[error("degenerate groups: {0}")]
    DegenerateGroups(String),
    #[error("need at least {needed} values per group, found {found}")]
    InsufficientSamples { needed: usize, found: usize },
    #[error("tier thresholds must satisfy t1 < t2 (got {t1}, {t2})")]
    BadThresholds { t1: f64, t2: f64 },

    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("missing upstream artifact `{}`", .0.display())]
    MissingUpstream(PathBuf),
    #[error("stage `{stage}` failed: {source}")]
    StageFailure {
        stage: String,
        #[source]
        source: Box<Error>,
    },
    #[error("checksum mismatch for `{0}`")]
    ChecksumMismatch(String),
    #[error("malformed artifact `{0}`")]
    MalformedArtifact(String),

    #[error("i/o error on `{}`: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn in_stage(self, stage: &str) -> Self {
        match self {
            e @ Error::StageFailure { .. } => e,
            e => Error::StageFailure { stage: stage.to_string(), source: Box::new(e) },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

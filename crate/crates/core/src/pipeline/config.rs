use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{DEFAULT_T1, DEFAULT_T2};
use crate::weights::{CvPlan, ModelConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightsSource {
    Derive {
        #[serde(default = "default_models")]
        models: Vec<ModelConfig>,
        /// The plan's own seed is replaced by a substream of the run seed.
        #[serde(default)]
        cv: CvPlan,
        #[serde(default = "default_permutation_repeats")]
        permutation_repeats: usize,
    },
    Import {
        path: PathBuf,
    },
}

impl Default for WeightsSource {
    fn default() -> Self {
        WeightsSource::Derive {
            models: default_models(),
            cv: CvPlan::default(),
            permutation_repeats: default_permutation_repeats(),
        }
    }
}

fn default_models() -> Vec<ModelConfig> {
    ModelConfig::defaults()
}

fn default_permutation_repeats() -> usize {
    5
}

fn default_k_min() -> usize {
    2
}

fn default_k_max() -> usize {
    30
}

fn default_min_cluster_size() -> usize {
    5
}

fn default_t1() -> f64 {
    DEFAULT_T1
}

fn default_t2() -> f64 {
    DEFAULT_T2
}

fn default_n_permutations() -> usize {
    999
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("output")
}

fn default_true() -> bool {
    true
}

fn default_alpha() -> f64 {
    0.05
}

fn default_top_m() -> usize {
    4
}

/// Run configuration. Relative paths are resolved against the directory of
/// the config file by [`PipelineConfig::load`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub schema: PathBuf,
    #[serde(default)]
    pub weights: WeightsSource,
    #[serde(default = "default_k_min")]
    pub k_min: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_min_cluster_size")]
    pub min_cluster_size: usize,
    #[serde(default = "default_t1")]
    pub t1: f64,
    #[serde(default = "default_t2")]
    pub t2: f64,
    #[serde(default = "default_n_permutations")]
    pub n_permutations: usize,
    pub seed: u64,
    /// Not echoed into the manifest so that runs into different directories
    /// produce identical trees.
    #[serde(default = "default_output_dir", skip_serializing)]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub log_target: bool,
    #[serde(default = "default_true")]
    pub strict_missing: bool,
    #[serde(default)]
    pub bh_adjust: bool,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_true")]
    pub emit_matrix_csv: bool,
    /// Column tallied in `composition.csv`; defaults to the first metadata
    /// column of the schema.
    #[serde(default)]
    pub metadata_column: Option<String>,
    #[serde(default = "default_top_m")]
    pub effect_top_m: usize,
    /// Worker cap; `None` uses rayon's default. Never affects outputs.
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
}

impl PipelineConfig {
    /// Defaults for everything except the required fields.
    pub fn new(input: impl Into<PathBuf>, schema: impl Into<PathBuf>, seed: u64) -> Self {
        let text = serde_json::json!({"input": input.into(), "schema": schema.into(), "seed": seed});
        serde_json::from_value(text).expect("defaults deserialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::load_patched(path, serde_json::Map::new())
    }

    /// Loads `path` after overwriting its top-level keys with `patch`.
    pub fn load_patched(path: &Path, patch: serde_json::Map<String, serde_json::Value>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| Error::InvalidConfig(format!("{}: expected a JSON object", path.display())))?;
        obj.extend(patch);
        let mut config: Self =
            serde_json::from_value(value).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        config.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.input);
        fix(&mut self.schema);
        fix(&mut self.output_dir);
        if let WeightsSource::Import { path } = &mut self.weights {
            fix(path);
        }
    }

    /// Checks value ranges and that every referenced input exists.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.k_min == 0 || self.k_min > self.k_max {
            return bad(format!("need 1 <= k_min <= k_max (got {}, {})", self.k_min, self.k_max));
        }
        if !(self.t1 < self.t2) {
            return bad(format!("need t1 < t2 (got {}, {})", self.t1, self.t2));
        }
        if self.min_cluster_size == 0 {
            return bad("min_cluster_size must be at least 1".into());
        }
        if self.n_permutations == 0 {
            return bad("n_permutations must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1) (got {})", self.alpha));
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        match &self.weights {
            WeightsSource::Derive { models, cv, permutation_repeats } => {
                if models.is_empty() {
                    return bad("weights.derive.models is empty".into());
                }
                for (i, m) in models.iter().enumerate() {
                    m.validate()?;
                    if models[..i].iter().any(|o| o.name() == m.name()) {
                        return bad(format!("model `{}` listed twice", m.name()));
                    }
                }
                cv.validate()?;
                if *permutation_repeats == 0 {
                    return bad("permutation_repeats must be at least 1".into());
                }
            }
            WeightsSource::Import { path } => {
                if !path.is_file() {
                    return bad(format!("weights file {} does not exist", path.display()));
                }
            }
        }
        for (what, p) in [("input", &self.input), ("schema", &self.schema)] {
            if !p.is_file() {
                return bad(format!("{what} file {} does not exist", p.display()));
            }
        }
        Ok(())
    }
}

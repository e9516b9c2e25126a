use serde::{Deserialize, Serialize};

use super::ensemble::{fit_forest, fit_gbrt, Forest, ForestParams, Gbrt, GbrtParams};
use super::ridge::{fit_ridge, RidgeModel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub trait Regressor<T: Scalar> {
    fn predict_row(&self, row: &[T]) -> T;

    fn predict(&self, x: &[Vec<T>]) -> Vec<T> {
        x.iter().map(|r| self.predict_row(r)).collect()
    }
}

fn default_lambda() -> f64 {
    1.0
}

/// Built-in regressors and their hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    Ridge {
        #[serde(default = "default_lambda")]
        lambda: f64,
    },
    RandomForest(ForestParams),
    Gbrt(GbrtParams),
}

impl ModelConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::Ridge { .. } => "ridge",
            ModelConfig::RandomForest(_) => "random_forest",
            ModelConfig::Gbrt(_) => "gbrt",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelConfig::Ridge { lambda } if !(*lambda >= 0.0 && lambda.is_finite()) => {
                Err(Error::InvalidModel("lambda must be finite and >= 0".into()))
            }
            ModelConfig::Ridge { .. } => Ok(()),
            ModelConfig::RandomForest(p) => p.validate(),
            ModelConfig::Gbrt(p) => p.validate(),
        }
    }

    pub fn defaults() -> Vec<ModelConfig> {
        vec![
            ModelConfig::Ridge { lambda: default_lambda() },
            ModelConfig::RandomForest(ForestParams::default()),
            ModelConfig::Gbrt(GbrtParams::default()),
        ]
    }

    pub fn fit<T: Scalar>(&self, x: &[Vec<T>], y: &[T], seed: u64) -> Result<FittedModel<T>> {
        self.validate()?;
        Ok(match self {
            ModelConfig::Ridge { lambda } => FittedModel::Ridge(fit_ridge(x, y, T::lit(*lambda))?),
            ModelConfig::RandomForest(p) => FittedModel::Forest(fit_forest(x, y, p, seed)?),
            ModelConfig::Gbrt(p) => FittedModel::Gbrt(fit_gbrt(x, y, p, seed)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel<T> {
    Ridge(RidgeModel<T>),
    Forest(Forest<T>),
    Gbrt(Gbrt<T>),
}

impl<T: Scalar> Regressor<T> for FittedModel<T> {
    fn predict_row(&self, row: &[T]) -> T {
        match self {
            FittedModel::Ridge(m) => m.predict_row(row),
            FittedModel::Forest(m) => m.predict_row(row),
            FittedModel::Gbrt(m) => m.predict_row(row),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_json_shapes() {
        let cfgs: Vec<ModelConfig> = serde_json::from_str(
            r#"[{"kind": "ridge", "lambda": 0.5},
                {"kind": "random_forest", "n_trees": 10},
                {"kind": "gbrt"}]"#,
        )
        .unwrap();
        assert_eq!(cfgs[0], ModelConfig::Ridge { lambda: 0.5 });
        match &cfgs[1] {
            ModelConfig::RandomForest(p) => {
                assert_eq!(p.n_trees, 10);
                assert_eq!(p.max_depth, ForestParams::default().max_depth);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(cfgs[2], ModelConfig::Gbrt(GbrtParams::default()));
        assert_eq!(cfgs.iter().map(ModelConfig::name).collect::<Vec<_>>(), ["ridge", "random_forest", "gbrt"]);
    }

    #[test]
    fn invalid_configs() {
        assert!(ModelConfig::Ridge { lambda: -1.0 }.validate().is_err());
        let g = GbrtParams { learning_rate: 1.5, ..GbrtParams::default() };
        assert!(ModelConfig::Gbrt(g).validate().is_err());
    }
}

//! Stumps, AdaBoost, Gini trees, random forests and gradient boosting.
//!
//! Every model scores a feature row with the probability of a unit root.
//! Labels are +1 (unit root) / -1 (near unit root) at this boundary;
//! gradient boosting recodes them to 1/0 internally.

pub mod adaboost;
pub mod forest;
pub mod gbm;
pub mod gini;
pub mod matrix;
pub mod stump;
pub mod tree;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tsfeatures::{FEATURE_NAMES, SCHEMA_VERSION};

pub use adaboost::{fit_adaboost, AdaBoostModel};
pub use forest::{fit_forest, ForestModel, ForestParams};
pub use gbm::{fit_gbm, fit_gbm_validated, log_loss, to_binary, GbmModel, GbmParams};
pub use gini::gini;
pub use matrix::FeatureMatrix;
pub use stump::{fit_stump, Polarity, Stump};
pub use tree::{grow_tree, Tree, TreeNode};

pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Probability of a unit root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub probability_positive: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model_type", content = "model", rename_all = "snake_case")]
pub enum EnsembleModel {
    Stump(Stump),
    AdaBoost(AdaBoostModel),
    Forest(ForestModel),
    Gbm(GbmModel),
}

impl EnsembleModel {
    pub fn kind(&self) -> &'static str {
        match self {
            EnsembleModel::Stump(_) => "stump",
            EnsembleModel::AdaBoost(_) => "ada_boost",
            EnsembleModel::Forest(_) => "forest",
            EnsembleModel::Gbm(_) => "gbm",
        }
    }

    /// Unclamped score; see [`predict_proba`] for the checked entry point.
    pub fn score(&self, row: &[f64]) -> f64 {
        match self {
            EnsembleModel::Stump(s) => {
                if s.predict(row) == 1 {
                    1.0
                } else {
                    0.0
                }
            }
            EnsembleModel::AdaBoost(m) => m.score(row),
            EnsembleModel::Forest(m) => m.score(row),
            EnsembleModel::Gbm(m) => m.score(row),
        }
    }

    /// Highest feature index the model reads, plus one.
    fn min_arity(&self) -> usize {
        match self {
            EnsembleModel::Stump(s) => s.feature_index + 1,
            EnsembleModel::AdaBoost(m) => m.stumps.iter().map(|s| s.feature_index + 1).max().unwrap_or(0),
            EnsembleModel::Forest(m) => m.n_features,
            EnsembleModel::Gbm(m) => m.n_features,
        }
    }
}

/// Score `row` with `model`. The row must have the model's arity.
pub fn predict_proba(model: &EnsembleModel, row: &[f64]) -> Result<Prediction> {
    let need = model.min_arity();
    let exact = matches!(model, EnsembleModel::Forest(_) | EnsembleModel::Gbm(_));
    if row.len() < need || (exact && row.len() != need) {
        return Err(Error::Schema(format!(
            "{} model expects {} features, got {}",
            model.kind(),
            need,
            row.len()
        )));
    }
    let p = model.score(row);
    if !p.is_finite() {
        return Err(Error::Numerical("non-finite score".into()));
    }
    Ok(Prediction {
        probability_positive: p.clamp(0.0, 1.0),
    })
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoredThreshold {
    pub cost_ratio: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSet {
    pub scores: Vec<f64>,
    /// +1 unit root, -1 near unit root.
    pub labels: Vec<i8>,
}

/// On-disk form of a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format_version: u32,
    pub schema_version: u32,
    pub feature_names: Vec<String>,
    /// Hyperparameters as given to the trainer, for the record.
    #[serde(default)]
    pub hyperparameters: serde_json::Value,
    /// Thresholds calibrated for specific cost ratios.
    #[serde(default)]
    pub thresholds: Vec<StoredThreshold>,
    /// Validation scores and labels, kept so any other ratio can be
    /// calibrated at scoring time.
    #[serde(default)]
    pub calibration_set: Option<CalibrationSet>,
    #[serde(flatten)]
    pub model: EnsembleModel,
}

impl ModelDocument {
    /// Wrap a model trained on the full feature bank.
    pub fn new(model: EnsembleModel, hyperparameters: serde_json::Value) -> Self {
        Self::with_features(model, FEATURE_NAMES.iter().map(|s| s.to_string()).collect(), hyperparameters)
    }

    pub fn with_features(model: EnsembleModel, feature_names: Vec<String>, hyperparameters: serde_json::Value) -> Self {
        ModelDocument {
            format_version: MODEL_FORMAT_VERSION,
            schema_version: SCHEMA_VERSION,
            feature_names,
            hyperparameters,
            thresholds: Vec::new(),
            calibration_set: None,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(s)?;
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Schema(format!(
                "model format version {} is not supported (expected {})",
                doc.format_version, MODEL_FORMAT_VERSION
            )));
        }
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "model was trained on feature schema {}, this build uses {}",
                doc.schema_version, SCHEMA_VERSION
            )));
        }
        if doc.model.min_arity() > doc.feature_names.len() {
            return Err(Error::Schema("model reads more features than it names".into()));
        }
        Ok(doc)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }

    pub fn predict(&self, row: &[f64]) -> Result<Prediction> {
        predict_proba(&self.model, row)
    }

    /// Stored threshold for `ratio` (to 1e-9), if any.
    pub fn threshold_for(&self, ratio: f64) -> Option<f64> {
        self.thresholds
            .iter()
            .find(|t| (t.cost_ratio - ratio).abs() <= 1e-9 * ratio.abs().max(1.0))
            .map(|t| t.threshold)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn data(n: usize, k: usize, seed: u64) -> (FeatureMatrix, Vec<i8>) {
        let mut rng = rng_from_seed(seed);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for _ in 0..n {
            let row: Vec<f64> = (0..k)
                .map(|_| if rng.gen::<f64>() < 0.05 { f64::NAN } else { rng.gen_range(-1.0..1.0) })
                .collect();
            let s = row[0].max(-2.0) + 0.7 * row[1 % k].min(2.0) + rng.gen_range(-0.4..0.4);
            y.push(if s.is_nan() || s > 0.0 { 1 } else { -1 });
            rows.push(row);
        }
        (FeatureMatrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn logistic_is_stable() {
        assert_eq!(logistic(0.0), 0.5);
        assert!(logistic(800.0) == 1.0 && logistic(-800.0) == 0.0);
        assert!((logistic(2.0) + logistic(-2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let (x, y) = data(200, 4, 1);
        let forest = fit_forest(
            &x,
            &y,
            &ForestParams {
                n_trees: 10,
                k_features: 2,
                min_node_size: 2,
                seed: 3,
                bootstrap: true,
            },
        )
        .unwrap();
        let gbm = fit_gbm(
            &x,
            &to_binary(&y),
            &GbmParams {
                n_trees: 15,
                seed: 4,
                ..GbmParams::default()
            },
        )
        .unwrap();
        let ada = fit_adaboost(&x, &y, 10).unwrap();
        let names: Vec<String> = (0..4).map(|i| format!("f{i}")).collect();
        for m in [
            EnsembleModel::Forest(forest),
            EnsembleModel::Gbm(gbm),
            EnsembleModel::AdaBoost(ada.clone()),
            EnsembleModel::Stump(ada.stumps[0].clone()),
        ] {
            let doc = ModelDocument::with_features(m, names.clone(), serde_json::json!({"seed": 3}));
            let back = ModelDocument::from_json(&doc.to_json().unwrap()).unwrap();
            assert_eq!(back, doc);
            for i in 0..x.n_rows() {
                let a = doc.predict(x.row(i)).unwrap().probability_positive;
                let b = back.predict(x.row(i)).unwrap().probability_positive;
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn schema_checks() {
        let (x, y) = data(100, 3, 2);
        let f = fit_forest(
            &x,
            &y,
            &ForestParams {
                n_trees: 3,
                k_features: 3,
                ..ForestParams::default()
            },
        )
        .unwrap();
        let m = EnsembleModel::Forest(f);
        assert!(matches!(predict_proba(&m, &[0.0, 1.0]), Err(Error::Schema(_))));
        assert!(predict_proba(&m, &[0.0, 1.0, f64::NAN]).is_ok());

        let doc = ModelDocument::with_features(m, vec!["a".into(), "b".into(), "c".into()], serde_json::Value::Null);
        let mut v: serde_json::Value = serde_json::from_str(&doc.to_json().unwrap()).unwrap();
        v["schema_version"] = serde_json::json!(SCHEMA_VERSION + 1);
        assert!(matches!(ModelDocument::from_json(&v.to_string()), Err(Error::Schema(_))));
    }

    #[test]
    fn unanimous_pure_forest_gives_one() {
        let leaf = Tree {
            nodes: vec![TreeNode::Leaf { value: 1.0, weight: 5.0 }],
        };
        let m = EnsembleModel::Forest(ForestModel {
            trees: vec![leaf; 7],
            k_features: 1,
            min_node_size: 1,
            seed: 0,
            n_features: 2,
            oob_error: None,
        });
        assert_eq!(predict_proba(&m, &[0.3, -1.0]).unwrap().probability_positive, 1.0);
    }
}

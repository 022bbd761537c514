//! Gradient boosting for the logistic loss.
//!
//! Each round fits a depth-limited regression tree to the residuals `y - p`
//! on a row and column subsample, then replaces every leaf by the Newton step
//! `sum(y - p) / sum(p (1 - p))` over the rows it holds.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::logistic;
use super::matrix::FeatureMatrix;
use super::tree::{build_tree, Objective, Presorted, RowData, Tree, TreeParams};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    pub n_trees: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub subsample: f64,
    pub colsample: f64,
    pub seed: u64,
    /// Minimum hessian mass in a child.
    pub min_child_weight: f64,
    /// Rounds without validation improvement before stopping.
    pub patience: usize,
}

impl Default for GbmParams {
    fn default() -> Self {
        GbmParams {
            n_trees: 500,
            learning_rate: 0.1,
            max_depth: 6,
            subsample: 0.8,
            colsample: 0.8,
            seed: 0,
            min_child_weight: 1.0,
            patience: 25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbmModel {
    /// Log-odds of a unit root in the training labels.
    pub init_score: f64,
    pub trees: Vec<Tree>,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub subsample: f64,
    pub colsample: f64,
    pub seed: u64,
    pub n_features: usize,
    /// Validation log-loss after each round (round 0 is the constant model).
    pub validation_loss: Vec<f64>,
    /// Number of trees kept; `None` when no validation set was given.
    pub best_iteration: Option<usize>,
}

/// Mean logistic loss of raw scores `f` against 0/1 labels.
pub fn log_loss(f: &[f64], y: &[u8]) -> f64 {
    let s: f64 = f
        .iter()
        .zip(y)
        .map(|(&f, &y)| {
            // ln(1 + e^f) - y f, computed stably
            let softplus = if f > 0.0 { f + (-f).exp().ln_1p() } else { f.exp().ln_1p() };
            softplus - y as f64 * f
        })
        .sum();
    s / f.len() as f64
}

fn check_binary(labels: &[u8], n: usize) -> Result<()> {
    if labels.len() != n {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: n,
        });
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(Error::DegenerateLabels("gradient boosting labels must be 0 or 1".into()));
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    if pos == 0 || pos == n {
        return Err(Error::DegenerateLabels("both classes must be present".into()));
    }
    Ok(())
}

/// Convert +1/-1 labels to the 1/0 coding used here.
pub fn to_binary(labels: &[i8]) -> Vec<u8> {
    labels.iter().map(|&l| u8::from(l == 1)).collect()
}

const ROUND_STREAM: u64 = 0xB0;

pub fn fit_gbm(x: &FeatureMatrix, labels: &[u8], params: &GbmParams) -> Result<GbmModel> {
    fit_gbm_validated(x, labels, None, params)
}

/// Boost with optional early stopping on `(x_val, y_val)`: training stops
/// after `patience` rounds without a lower validation loss and the model is
/// cut back to the best round.
pub fn fit_gbm_validated(
    x: &FeatureMatrix,
    labels: &[u8],
    validation: Option<(&FeatureMatrix, &[u8])>,
    params: &GbmParams,
) -> Result<GbmModel> {
    check_binary(labels, x.n_rows())?;
    if !(params.learning_rate > 0.0 && params.learning_rate <= 1.0)
        || !(params.subsample > 0.0 && params.subsample <= 1.0)
        || !(params.colsample > 0.0 && params.colsample <= 1.0)
        || params.max_depth == 0
    {
        return Err(Error::InvalidConfig(
            "learning_rate, subsample and colsample must lie in (0, 1] and max_depth must be positive".into(),
        ));
    }
    if let Some((xv, yv)) = validation {
        if xv.n_cols() != x.n_cols() || yv.len() != xv.n_rows() {
            return Err(Error::Schema("validation set does not match training set".into()));
        }
    }
    let n = x.n_rows();
    let k = x.n_cols();
    let pos = labels.iter().filter(|&&l| l == 1).count() as f64;
    let init_score = (pos / (n as f64 - pos)).ln();
    let pre = Presorted::new(x);
    let y: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
    let mut f = vec![init_score; n];
    let mut fv: Vec<f64> = validation.map_or(Vec::new(), |(xv, _)| vec![init_score; xv.n_rows()]);
    let n_rows_sub = ((params.subsample * n as f64).round() as usize).clamp(1, n);
    let n_cols_sub = ((params.colsample * k as f64).round() as usize).clamp(1, k);

    let mut model = GbmModel {
        init_score,
        trees: Vec::new(),
        learning_rate: params.learning_rate,
        max_depth: params.max_depth,
        subsample: params.subsample,
        colsample: params.colsample,
        seed: params.seed,
        n_features: k,
        validation_loss: Vec::new(),
        best_iteration: None,
    };
    let mut best = (f64::INFINITY, 0usize);
    if let Some((_, yv)) = validation {
        let l0 = log_loss(&fv, yv);
        model.validation_loss.push(l0);
        best = (l0, 0);
    }

    let mut residual = vec![0.0; n];
    let mut hessian = vec![0.0; n];
    for b in 0..params.n_trees {
        let mut rng = rng_from_seed(derive_seed(params.seed, ROUND_STREAM, b as u64));
        for i in 0..n {
            let p = logistic(f[i]);
            residual[i] = y[i] - p;
            hessian[i] = p * (1.0 - p);
        }
        let mut weights = vec![0.0; n];
        if n_rows_sub == n {
            weights.fill(1.0);
        } else {
            for i in sample(&mut rng, n, n_rows_sub) {
                weights[i] = 1.0;
            }
        }
        let mut allowed: Vec<usize> = if n_cols_sub == k {
            (0..k).collect()
        } else {
            sample(&mut rng, k, n_cols_sub).into_vec()
        };
        allowed.sort_unstable();
        let tree_params = TreeParams {
            objective: Objective::Newton,
            min_node_size: 0.0,
            max_depth: Some(params.max_depth),
            min_child_weight: params.min_child_weight,
            features_per_node: allowed.len(),
            allowed_features: allowed,
        };
        let data = RowData {
            target: &residual,
            hessian: Some(&hessian),
            weights: &weights,
        };
        let tree = build_tree(&pre, &data, &tree_params, &mut rng);
        for (i, fi) in f.iter_mut().enumerate() {
            *fi += params.learning_rate * tree.predict(x.row(i));
        }
        if let Some((xv, yv)) = validation {
            for (i, fi) in fv.iter_mut().enumerate() {
                *fi += params.learning_rate * tree.predict(xv.row(i));
            }
            let l = log_loss(&fv, yv);
            model.validation_loss.push(l);
            model.trees.push(tree);
            if l < best.0 {
                best = (l, b + 1);
            } else if b + 1 - best.1 >= params.patience {
                break;
            }
        } else {
            model.trees.push(tree);
        }
    }
    if validation.is_some() {
        model.trees.truncate(best.1);
        model.best_iteration = Some(best.1);
    }
    Ok(model)
}

impl GbmModel {
    /// Raw additive score `F_B(x)`.
    pub fn raw_score(&self, row: &[f64]) -> f64 {
        self.raw_score_at(row, self.trees.len())
    }

    pub fn raw_score_at(&self, row: &[f64], rounds: usize) -> f64 {
        self.init_score
            + self.trees[..rounds.min(self.trees.len())]
                .iter()
                .map(|t| self.learning_rate * t.predict(row))
                .sum::<f64>()
    }

    pub fn score(&self, row: &[f64]) -> f64 {
        logistic(self.raw_score(row))
    }

    /// Split gain per feature summed over trees (unscaled).
    pub fn raw_importance(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.n_features];
        for t in &self.trees {
            for (a, v) in acc.iter_mut().zip(t.importance(self.n_features)) {
                *a += v;
            }
        }
        acc
    }
}

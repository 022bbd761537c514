//! Discrete AdaBoost over decision stumps.

use serde::{Deserialize, Serialize};

use super::matrix::{check_labels, FeatureMatrix};
use super::stump::{fit_stump_sorted, SortedColumns, Stump};
use super::logistic;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostModel {
    pub stumps: Vec<Stump>,
    pub stage_weights: Vec<f64>,
    /// Rounds requested; fewer stumps are kept when training stops early.
    pub n_rounds: usize,
    /// Normalisers `Z_t` of the weight updates.
    pub normalizers: Vec<f64>,
}

const DEGENERATE: f64 = 1e-10;

pub fn fit_adaboost(x: &FeatureMatrix, labels: &[i8], n_rounds: usize) -> Result<AdaBoostModel> {
    if n_rounds == 0 {
        return Err(Error::InvalidConfig("n_rounds must be at least 1".into()));
    }
    check_labels(labels, x.n_rows())?;
    let n = x.n_rows();
    let sorted = SortedColumns::new(x);
    let mut d = vec![1.0 / n as f64; n];
    let mut model = AdaBoostModel {
        stumps: Vec::new(),
        stage_weights: Vec::new(),
        n_rounds,
        normalizers: Vec::new(),
    };
    for _ in 0..n_rounds {
        let stump = fit_stump_sorted(&sorted, labels, &d)?;
        let preds: Vec<i8> = (0..n).map(|i| stump.predict(x.row(i))).collect();
        let eps: f64 = (0..n).filter(|&i| preds[i] != labels[i]).map(|i| d[i]).sum();
        if (eps - 0.5).abs() < DEGENERATE {
            break;
        }
        let perfect = eps < DEGENERATE;
        let e = eps.max(DEGENERATE);
        let alpha = 0.5 * ((1.0 - e) / e).ln();
        model.stumps.push(stump);
        model.stage_weights.push(alpha);
        if perfect {
            model.normalizers.push(2.0 * (e * (1.0 - e)).sqrt());
            break;
        }
        for i in 0..n {
            d[i] *= (-alpha * (labels[i] * preds[i]) as f64).exp();
        }
        let z: f64 = d.iter().sum();
        for w in &mut d {
            *w /= z;
        }
        model.normalizers.push(z);
    }
    if model.stumps.is_empty() {
        return Err(Error::Numerical("first stump has weighted error 0.5".into()));
    }
    Ok(model)
}

impl AdaBoostModel {
    /// `sum alpha_t h_t(x) / sum alpha_t` using the first `rounds` stumps.
    pub fn margin_at(&self, row: &[f64], rounds: usize) -> f64 {
        let k = rounds.min(self.stumps.len());
        let total: f64 = self.stage_weights[..k].iter().sum();
        if total <= 0.0 {
            return 0.0;
        }
        let s: f64 = self.stumps[..k]
            .iter()
            .zip(&self.stage_weights)
            .map(|(h, a)| a * h.predict(row) as f64)
            .sum();
        s / total
    }

    pub fn margin(&self, row: &[f64]) -> f64 {
        self.margin_at(row, self.stumps.len())
    }

    pub fn predict(&self, row: &[f64]) -> i8 {
        if self.margin(row) >= 0.0 {
            1
        } else {
            -1
        }
    }

    /// Logistic transform of the normalised margin.
    pub fn score(&self, row: &[f64]) -> f64 {
        logistic(self.margin(row))
    }

    pub fn score_at(&self, row: &[f64], rounds: usize) -> f64 {
        logistic(self.margin_at(row, rounds))
    }
}

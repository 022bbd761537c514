//! Mean decrease in impurity, scaled to 0..100.

use serde::{Deserialize, Serialize};

use crate::learners::{EnsembleModel, ForestModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Importance {
    pub feature: String,
    /// Unscaled impurity decrease per unit of root weight.
    pub raw: f64,
    pub scaled: f64,
}

/// Min-max scale to `[0, 100]`. With no spread every positive value maps to
/// 100 and zeros stay 0.
pub fn minmax_scale(raw: &[f64]) -> Vec<f64> {
    let max = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = raw.iter().cloned().fold(f64::INFINITY, f64::min);
    if max > min {
        raw.iter().map(|v| 100.0 * ((v - min) / (max - min))).collect()
    } else {
        raw.iter().map(|&v| if v > 0.0 { 100.0 } else { 0.0 }).collect()
    }
}

fn named(raw: Vec<f64>, names: &[String]) -> Vec<Importance> {
    let scaled = minmax_scale(&raw);
    raw.into_iter()
        .zip(scaled)
        .enumerate()
        .map(|(i, (raw, scaled))| Importance {
            feature: names.get(i).cloned().unwrap_or_else(|| format!("x{i}")),
            raw,
            scaled,
        })
        .collect()
}

/// Gini decrease per feature, weighted by node share and averaged over trees.
pub fn mdi_importance(model: &ForestModel, names: &[String]) -> Vec<Importance> {
    named(model.raw_importance(), names)
}

/// Impurity-based importance for any tree ensemble (split gain for boosting);
/// `None` for single stumps and AdaBoost.
pub fn model_importance(model: &EnsembleModel, names: &[String]) -> Option<Vec<Importance>> {
    match model {
        EnsembleModel::Forest(f) => Some(mdi_importance(f, names)),
        EnsembleModel::Gbm(g) => Some(named(g.raw_importance(), names)),
        _ => None,
    }
}

/// Sorted by scaled score, highest first; ties keep schema order.
pub fn ranked(mut v: Vec<Importance>) -> Vec<Importance> {
    v.sort_by(|a, b| b.scaled.total_cmp(&a.scaled));
    v
}

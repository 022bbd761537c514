//! ROC curves by threshold sweep.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// From `(0, 0)` at threshold `+inf` to `(1, 1)` at the lowest score.
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// ROC of `scores` for detecting `+1` truths: a row is flagged when its
/// score is at least the threshold. One point per distinct score.
pub fn roc(scores: &[f64], truths: &[i8]) -> Result<RocCurve> {
    if scores.len() != truths.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: truths.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Numerical("NaN score".into()));
    }
    let n_pos = truths.iter().filter(|&&t| t == 1).count() as f64;
    let n_neg = truths.len() as f64 - n_pos;
    if n_pos == 0.0 || n_neg == 0.0 {
        return Err(Error::DegenerateLabels("ROC needs both classes".into()));
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let (mut tp, mut fp) = (0.0, 0.0);
    let mut auc = 0.0;
    let mut j = 0;
    while j < idx.len() {
        let s = scores[idx[j]];
        while j < idx.len() && scores[idx[j]] == s {
            if truths[idx[j]] == 1 {
                tp += 1.0;
            } else {
                fp += 1.0;
            }
            j += 1;
        }
        let prev = points.last().unwrap();
        let p = RocPoint {
            threshold: s,
            fpr: fp / n_neg,
            tpr: tp / n_pos,
        };
        auc += (p.fpr - prev.fpr) * (p.tpr + prev.tpr) / 2.0;
        points.push(p);
    }
    Ok(RocCurve { points, auc })
}

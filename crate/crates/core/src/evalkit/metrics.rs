//! Confusion matrices and the measures derived from them.
//!
//! The positive class is a near unit root: a "positive" call is a rejection
//! of the unit-root null, so sensitivity is power and specificity is one
//! minus the size.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// Near unit root called near unit root.
    pub tp: u64,
    /// Unit root called near unit root (a Type I error).
    pub fp: u64,
    /// Unit root called unit root.
    pub tn: u64,
    /// Near unit root called unit root (a Type II error).
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn add(&mut self, prediction: i8, truth: i8) {
        match (prediction == 1, truth == 1) {
            (false, false) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, true) => self.tn += 1,
            (true, false) => self.fn_ += 1,
        }
    }
}

/// Tally +1 (unit root) / -1 (near unit root) predictions against truths.
pub fn confusion(predictions: &[i8], truths: &[i8]) -> Result<ConfusionMatrix> {
    if predictions.len() != truths.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: truths.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::EmptyInput("no predictions".into()));
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &t) in predictions.iter().zip(truths) {
        cm.add(p, t);
    }
    Ok(cm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub acc: f64,
    pub sen: f64,
    pub spe: f64,
    pub ppv: f64,
    pub npv: f64,
    pub f_beta: f64,
    pub beta: f64,
    pub mcc: f64,
    /// Names of measures whose denominator was zero; those are reported as 0.
    pub degenerate: Vec<String>,
}

pub const METRIC_NAMES: [&str; 7] = ["ACC", "SEN", "SPE", "PPV", "NPV", "F1", "MCC"];

impl MetricsReport {
    /// The seven measures in table order.
    pub fn row(&self) -> [f64; 7] {
        [self.acc, self.sen, self.spe, self.ppv, self.npv, self.f_beta, self.mcc]
    }
}

pub fn metrics(cm: &ConfusionMatrix, beta: f64) -> MetricsReport {
    let mut degenerate = Vec::new();
    let mut ratio = |num: f64, den: f64, name: &str| {
        if den > 0.0 {
            num / den
        } else {
            degenerate.push(name.to_string());
            0.0
        }
    };
    let (tp, fp, tn, fn_) = (cm.tp as f64, cm.fp as f64, cm.tn as f64, cm.fn_ as f64);
    let acc = ratio(tp + tn, tp + fp + tn + fn_, "acc");
    let sen = ratio(tp, tp + fn_, "sen");
    let spe = ratio(tn, tn + fp, "spe");
    let ppv = ratio(tp, tp + fp, "ppv");
    let npv = ratio(tn, tn + fn_, "npv");
    let b2 = beta * beta;
    let f_beta = ratio((1.0 + b2) * ppv * sen, b2 * ppv + sen, "f_beta");
    let mcc = ratio(
        tp * tn - fp * fn_,
        ((tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_)).sqrt(),
        "mcc",
    );
    MetricsReport {
        acc,
        sen,
        spe,
        ppv,
        npv,
        f_beta,
        beta,
        mcc,
        degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_tally() {
        let p = [1, 1, -1, -1, 1, -1, 1, -1, -1, 1];
        let t = [1, -1, -1, 1, 1, -1, 1, -1, 1, -1];
        let cm = confusion(&p, &t).unwrap();
        assert_eq!(cm, ConfusionMatrix { tp: 3, fp: 2, tn: 3, fn_: 2 });
        let flipped: Vec<i8> = t.iter().map(|v| -v).collect();
        let cm = confusion(&flipped, &t).unwrap();
        assert_eq!((cm.tp, cm.tn), (0, 0));
        assert!(confusion(&p[..3], &t).is_err());
    }

    #[test]
    fn worked_example() {
        let m = metrics(&ConfusionMatrix { tp: 50, fp: 10, tn: 40, fn_: 0 }, 1.0);
        assert!((m.acc - 0.9).abs() < 1e-12);
        assert_eq!(m.sen, 1.0);
        assert!((m.spe - 0.8).abs() < 1e-12);
        assert!((m.ppv - 50.0 / 60.0).abs() < 1e-12);
        assert!((m.mcc - 2000.0 / (60.0f64 * 50.0 * 50.0 * 40.0).sqrt()).abs() < 1e-12);
        assert!((m.mcc - 0.816).abs() < 1e-3);
        assert!(m.degenerate.is_empty());
    }

    #[test]
    fn perfect_and_degenerate() {
        let m = metrics(&ConfusionMatrix { tp: 5, fp: 0, tn: 5, fn_: 0 }, 1.0);
        assert_eq!(m.row(), [1.0; 7]);
        let m = metrics(&ConfusionMatrix { tp: 0, fp: 0, tn: 5, fn_: 5 }, 1.0);
        assert_eq!(m.ppv, 0.0);
        assert!(m.degenerate.contains(&"ppv".to_string()));
        assert!(m.degenerate.contains(&"mcc".to_string()));
    }
}

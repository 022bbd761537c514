//! Decision stumps fitted by weighted Gini minimisation.

use serde::{Deserialize, Serialize};

use super::gini::gini_weighted;
use super::matrix::{check_labels, FeatureMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    /// `x <= threshold` predicts +1.
    PredictPositiveBelow,
    /// `x > threshold` predicts +1.
    PredictPositiveAbove,
    /// Both sides hold a weighted majority of +1.
    AlwaysPositive,
    /// Both sides hold a weighted majority of -1.
    AlwaysNegative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature_index: usize,
    pub threshold: f64,
    pub polarity: Polarity,
    /// Invalid values are treated as lying below the threshold when set.
    pub missing_below: bool,
}

impl Stump {
    pub fn predict(&self, row: &[f64]) -> i8 {
        let x = row[self.feature_index];
        let below = if x.is_nan() { self.missing_below } else { x <= self.threshold };
        match (below, self.polarity) {
            (true, Polarity::PredictPositiveBelow)
            | (false, Polarity::PredictPositiveAbove)
            | (_, Polarity::AlwaysPositive) => 1,
            _ => -1,
        }
    }
}

/// Row indices of each column sorted by value, invalid entries excluded.
#[derive(Debug, Clone)]
pub(crate) struct SortedColumns {
    pub columns: Vec<Vec<f64>>,
    pub order: Vec<Vec<u32>>,
}

impl SortedColumns {
    pub fn new(x: &FeatureMatrix) -> Self {
        let columns = x.columns();
        let order = columns
            .iter()
            .map(|c| {
                let mut idx: Vec<u32> = (0..c.len() as u32).filter(|&i| !c[i as usize].is_nan()).collect();
                idx.sort_by(|&a, &b| c[a as usize].total_cmp(&c[b as usize]).then(a.cmp(&b)));
                idx
            })
            .collect();
        SortedColumns { columns, order }
    }
}

/// Midpoint between two consecutive distinct values, kept strictly below the
/// upper one.
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo + (hi - lo) / 2.0;
    if m < hi {
        m
    } else {
        lo
    }
}

pub fn fit_stump(x: &FeatureMatrix, labels: &[i8], weights: &[f64]) -> Result<Stump> {
    check_labels(labels, x.n_rows())?;
    if weights.len() != x.n_rows() {
        return Err(Error::LengthMismatch {
            left: x.n_rows(),
            right: weights.len(),
        });
    }
    if weights.iter().any(|w| !(*w >= 0.0)) || weights.iter().sum::<f64>() <= 0.0 {
        return Err(Error::InvalidSpec("weights must be non-negative with positive sum".into()));
    }
    fit_stump_sorted(&SortedColumns::new(x), labels, weights)
}

pub(crate) fn fit_stump_sorted(sorted: &SortedColumns, labels: &[i8], weights: &[f64]) -> Result<Stump> {
    let (mut tot_pos, mut tot_neg) = (0.0, 0.0);
    for (l, w) in labels.iter().zip(weights) {
        if *l == 1 {
            tot_pos += w;
        } else {
            tot_neg += w;
        }
    }
    let total = tot_pos + tot_neg;
    let mut best: Option<(f64, Stump)> = None;
    for (f, (col, order)) in sorted.columns.iter().zip(&sorted.order).enumerate() {
        let (mut vp, mut vn) = (0.0, 0.0);
        for &i in order {
            let i = i as usize;
            if labels[i] == 1 {
                vp += weights[i];
            } else {
                vn += weights[i];
            }
        }
        let (mp, mn) = (tot_pos - vp, tot_neg - vn);
        let (mut lp, mut ln) = (0.0, 0.0);
        for k in 0..order.len().saturating_sub(1) {
            let i = order[k] as usize;
            if labels[i] == 1 {
                lp += weights[i];
            } else {
                ln += weights[i];
            }
            let (a, b) = (col[i], col[order[k + 1] as usize]);
            if !(a < b) {
                continue;
            }
            let (rp, rn) = (vp - lp, vn - ln);
            let missing_below = lp + ln >= rp + rn;
            let (lp2, ln2, rp2, rn2) = if missing_below {
                (lp + mp, ln + mn, rp, rn)
            } else {
                (lp, ln, rp + mp, rn + mn)
            };
            let wl = lp2 + ln2;
            let wr = rp2 + rn2;
            let impurity = (wl * gini_weighted(lp2, ln2) + wr * gini_weighted(rp2, rn2)) / total;
            if best.as_ref().map_or(true, |(bi, _)| impurity < *bi) {
                // Each side predicts its weighted majority, so the weighted
                // error never exceeds one half.
                let polarity = match (lp2 >= ln2, rp2 >= rn2) {
                    (true, false) => Polarity::PredictPositiveBelow,
                    (false, true) => Polarity::PredictPositiveAbove,
                    (true, true) => Polarity::AlwaysPositive,
                    (false, false) => Polarity::AlwaysNegative,
                };
                best = Some((
                    impurity,
                    Stump {
                        feature_index: f,
                        threshold: midpoint(a, b),
                        polarity,
                        missing_below,
                    },
                ));
            }
        }
    }
    best.map(|(_, s)| s)
        .ok_or_else(|| Error::Numerical("no feature has two distinct values".into()))
}

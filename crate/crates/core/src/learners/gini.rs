//! Gini impurity.

use crate::error::{Error, Result};

/// `1 - sum p_c^2` over class counts.
pub fn gini(class_counts: &[u64]) -> Result<f64> {
    let total: u64 = class_counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyNode);
    }
    let t = total as f64;
    Ok(1.0 - class_counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>())
}

/// Two-class impurity from weighted masses.
pub(crate) fn gini_weighted(pos: f64, neg: f64) -> f64 {
    let w = pos + neg;
    if w <= 0.0 {
        return 0.0;
    }
    let p = pos / w;
    2.0 * p * (1.0 - p)
}

//! Weighted symmetric estimator test.

use std::collections::BTreeMap;

use super::{aux, detrend, DetSpec};
use crate::error::{Error, Result};

/// `n (rho_ws - 1)` where
/// `rho_ws = sum y_{t-1} y_t / (sum_{t=2}^{n-1} y_t^2 + n^{-1} sum y_t^2)`
/// on the demeaned or detrended series.
pub(super) fn pgff(y: &[f64], det: DetSpec) -> Result<(f64, usize, BTreeMap<String, f64>)> {
    let z = detrend(y, det)?;
    let n = z.len();
    let num: f64 = z.windows(2).map(|w| w[0] * w[1]).sum();
    let inner: f64 = z[1..n - 1].iter().map(|v| v * v).sum();
    let total: f64 = z.iter().map(|v| v * v).sum();
    let den = inner + total / n as f64;
    if !(den > 0.0) {
        return Err(Error::DegenerateSeries("zero variance after detrending".into()));
    }
    let rho = num / den;
    Ok((n as f64 * (rho - 1.0), 0, aux(&[("rho_ws", rho)])))
}

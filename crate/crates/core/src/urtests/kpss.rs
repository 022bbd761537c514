//! KPSS stationarity statistic.

use std::collections::BTreeMap;

use super::{aux, bartlett_bandwidth, detrend, long_run_variance, DetSpec};
use crate::error::{Error, Result};

/// `eta = sum S_t^2 / (T^2 lambda^2)` with `S_t` the partial sums of the
/// detrended series.
pub(super) fn kpss(y: &[f64], det: DetSpec) -> Result<(f64, usize, BTreeMap<String, f64>)> {
    let e = detrend(y, det)?;
    let n = e.len() as f64;
    let l = bartlett_bandwidth(e.len());
    let lambda2 = long_run_variance(&e, l);
    if !(lambda2 > 0.0) {
        return Err(Error::Numerical("non-positive long-run variance".into()));
    }
    let mut s = 0.0;
    let mut sum_sq = 0.0;
    for v in &e {
        s += v;
        sum_sq += s * s;
    }
    let eta = sum_sq / (n * n * lambda2);
    Ok((eta, l, aux(&[("lambda2", lambda2)])))
}

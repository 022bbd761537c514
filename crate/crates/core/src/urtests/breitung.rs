//! Breitung's variance-ratio statistic.

use std::collections::BTreeMap;

use super::{aux, detrend, DetSpec};
use crate::error::{Error, Result};

/// `rho = T^{-2} sum U_t^2 / sum u_t^2` with `U_t` the partial sums of the
/// detrended series `u_t`. Small values reject the unit root.
pub(super) fn breitung(y: &[f64], det: DetSpec) -> Result<(f64, usize, BTreeMap<String, f64>)> {
    let u = detrend(y, det)?;
    let n = u.len() as f64;
    let mut s = 0.0;
    let mut num = 0.0;
    let mut den = 0.0;
    for v in &u {
        s += v;
        num += s * s;
        den += v * v;
    }
    if !(den > 0.0) {
        return Err(Error::DegenerateSeries("zero variance after detrending".into()));
    }
    let rho = num / (n * n * den);
    Ok((rho, 0, aux(&[("sum_u2", den)])))
}

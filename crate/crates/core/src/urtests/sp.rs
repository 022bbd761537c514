//! Schmidt-Phillips LM test (linear trend).

use std::collections::BTreeMap;

use super::ols::{ols, Design};
use super::{aux, bartlett_bandwidth, long_run_variance};
use crate::error::{Error, Result};

/// `Z(tau) = tau / omega` where `tau` is the t-ratio on `S_{t-1}` in the
/// regression of `dy_t` on a constant and the lagged detrended level, and
/// `omega^2` is the ratio of short- to long-run residual variance.
pub(super) fn schmidt_phillips(y: &[f64]) -> Result<(f64, usize, BTreeMap<String, f64>)> {
    let big_t = y.len();
    let delta = (y[big_t - 1] - y[0]) / (big_t - 1) as f64;
    let psi = y[0] - delta;
    let s: Vec<f64> = y
        .iter()
        .enumerate()
        .map(|(t, v)| v - psi - delta * (t + 1) as f64)
        .collect();
    let n = big_t - 1;
    let mut d = Design::new(n);
    d.push_constant();
    d.push(s[..n].to_vec())?;
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let fit = ols(&d, &dy)?;
    let tau = fit.t_stat(1);
    let l = bartlett_bandwidth(n);
    let sigma_eps2 = fit.ssr / n as f64;
    let lrv = long_run_variance(&fit.residuals, l);
    if !(lrv > 0.0) {
        return Err(Error::Numerical("non-positive long-run variance".into()));
    }
    let omega2 = sigma_eps2 / lrv;
    Ok((
        tau / omega2.sqrt(),
        l,
        aux(&[("tau", tau), ("delta", delta), ("omega2", omega2)]),
    ))
}

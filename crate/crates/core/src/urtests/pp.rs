//! Phillips-Perron Z-tau.

use std::collections::BTreeMap;

use super::ols::{ols, Design};
use super::{aux, bartlett_bandwidth, long_run_variance, DetSpec};
use crate::error::{Error, Result};

/// `y_t = mu [+ beta (t - T/2)] + alpha y_{t-1} + u_t`, with the t-ratio on
/// `alpha - 1` corrected by the Bartlett long-run variance of `u`.
pub(super) fn pp(y: &[f64], det: DetSpec) -> Result<(f64, usize, BTreeMap<String, f64>)> {
    let big_t = y.len();
    let n = big_t - 1;
    let mut d = Design::new(n);
    d.push(y[..n].to_vec())?;
    d.push_constant();
    if det == DetSpec::ConstantAndTrend {
        let mid = big_t as f64 / 2.0;
        d.push((2..=big_t).map(|t| t as f64 - mid).collect())?;
    }
    let fit = ols(&d, &y[1..])?;
    let alpha = fit.coefficients[0];
    let se = fit.std_errors[0];
    let t_alpha = (alpha - 1.0) / se;
    let l = bartlett_bandwidth(n);
    let gamma0 = fit.ssr / n as f64;
    let lambda2 = long_run_variance(&fit.residuals, l);
    if !(lambda2 > 0.0) {
        return Err(Error::Numerical("non-positive long-run variance".into()));
    }
    let s = fit.sigma2.sqrt();
    let lambda = lambda2.sqrt();
    let z = (gamma0 / lambda2).sqrt() * t_alpha - (lambda2 - gamma0) / (2.0 * lambda) * (n as f64 * se / s);
    Ok((
        z,
        l,
        aux(&[
            ("alpha", alpha),
            ("se_alpha", se),
            ("gamma0", gamma0),
            ("lambda2", lambda2),
        ]),
    ))
}

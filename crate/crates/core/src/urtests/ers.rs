//! Elliott-Rothenberg-Stock tests: DF-GLS and the feasible point-optimal test.

use std::collections::BTreeMap;

use super::adf::{adf_regression, adf_statistic, feasible_max_lag, select_lags};
use super::ols::{ols, Design};
use super::{aux, DetSpec};
use crate::error::{Error, Result};

/// Local-to-unity constant for the GLS quasi-difference.
pub fn cbar(det: DetSpec) -> f64 {
    match det {
        DetSpec::ConstantAndTrend => -13.5,
        _ => -7.0,
    }
}

/// Quasi-differenced regression of `y` on its deterministic terms at
/// `a`. Returns the coefficients and the residual sum of squares.
fn quasi_difference_fit(y: &[f64], det: DetSpec, a: f64) -> Result<(Vec<f64>, f64)> {
    let n = y.len();
    let qd = |v: &dyn Fn(usize) -> f64| -> Vec<f64> {
        (0..n).map(|t| if t == 0 { v(0) } else { v(t) - a * v(t - 1) }).collect()
    };
    let mut d = Design::new(n);
    d.push(qd(&|_| 1.0))?;
    if det == DetSpec::ConstantAndTrend {
        d.push(qd(&|t| (t + 1) as f64))?;
    }
    let fit = ols(&d, &qd(&|t| y[t]))?;
    Ok((fit.coefficients, fit.ssr))
}

/// GLS-detrended series `y - z' beta` using the local alternative for
/// `det`, together with the quasi-differenced SSR.
pub fn gls_detrend(y: &[f64], det: DetSpec) -> Result<(Vec<f64>, f64)> {
    let a = 1.0 + cbar(det) / y.len() as f64;
    let (beta, ssr) = quasi_difference_fit(y, det, a)?;
    let yd = y
        .iter()
        .enumerate()
        .map(|(t, v)| {
            let mut fitted = beta[0];
            if det == DetSpec::ConstantAndTrend {
                fitted += beta[1] * (t + 1) as f64;
            }
            v - fitted
        })
        .collect();
    Ok((yd, ssr))
}

pub(super) fn ers_dfgls(y: &[f64], det: DetSpec) -> Result<(f64, usize, BTreeMap<String, f64>)> {
    let (yd, _) = gls_detrend(y, det)?;
    let p = select_lags(&yd, feasible_max_lag(yd.len(), DetSpec::None), DetSpec::None)?;
    let stat = adf_statistic(&yd, DetSpec::None, p)?;
    Ok((stat, p, aux(&[("cbar", cbar(det))])))
}

pub(super) fn ers_point_optimal(y: &[f64], det: DetSpec) -> Result<(f64, usize, BTreeMap<String, f64>)> {
    let a = 1.0 + cbar(det) / y.len() as f64;
    let (_, ssr_a) = quasi_difference_fit(y, det, a)?;
    let (_, ssr_1) = quasi_difference_fit(y, det, 1.0)?;
    let (fit, p) = adf_regression(y, det)?;
    let first_lag = det.n_terms() + 1;
    let b_sum: f64 = fit.coefficients[first_lag..].iter().sum();
    let omega2 = fit.sigma2 / ((1.0 - b_sum) * (1.0 - b_sum));
    if !(omega2 > 0.0) || !omega2.is_finite() {
        return Err(Error::Numerical("invalid spectral density estimate".into()));
    }
    let stat = (ssr_a - a * ssr_1) / omega2;
    Ok((
        stat,
        p,
        aux(&[("ssr_abar", ssr_a), ("ssr_one", ssr_1), ("omega2", omega2)]),
    ))
}

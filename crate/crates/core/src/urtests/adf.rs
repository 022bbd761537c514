//! Augmented Dickey-Fuller regression and BIC lag selection.

use std::collections::BTreeMap;

use super::ols::{bic, nested_ssr, ols, Design, OlsFit};
use super::{aux, DetSpec};
use crate::error::{Error, Result};

/// Schwert ceiling for the lag search: `floor(12 (T/100)^(1/4))`.
pub fn schwert_max_lag(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Regression of `dy_t` on `[det terms, y_{t-1}, dy_{t-1}, .., dy_{t-p}]` for
/// `t = start..T` (zero based). `start` must be at least `p + 1`.
pub fn adf_design(y: &[f64], det: DetSpec, p: usize, start: usize) -> Result<(Design, Vec<f64>)> {
    debug_assert!(start > p);
    let n = y.len();
    if start >= n {
        return Err(Error::InsufficientLength { needed: start + 1, got: n });
    }
    let rows = n - start;
    let mut d = Design::new(rows);
    if det.n_terms() >= 1 {
        d.push_constant();
    }
    if det.n_terms() == 2 {
        d.push((start..n).map(|t| (t + 1) as f64).collect())?;
    }
    d.push((start..n).map(|t| y[t - 1]).collect())?;
    for j in 1..=p {
        d.push((start..n).map(|t| y[t - j] - y[t - j - 1]).collect())?;
    }
    let dy = (start..n).map(|t| y[t] - y[t - 1]).collect();
    Ok((d, dy))
}

fn check_room(n: usize, det: DetSpec, max_lag: usize) -> Result<()> {
    let regressors = det.n_terms() + 1 + max_lag;
    if n < max_lag + 1 || n - max_lag - 1 <= regressors {
        return Err(Error::InsufficientLength {
            needed: max_lag + 2 + regressors,
            got: n,
        });
    }
    Ok(())
}

/// Lag order in `0..=max_lag` minimising BIC of the ADF regression. All
/// candidates are compared on the common sample that starts after `max_lag`
/// differences; ties go to the smaller order.
pub fn select_lags(y: &[f64], max_lag: usize, det: DetSpec) -> Result<usize> {
    check_room(y.len(), det, max_lag)?;
    if max_lag == 0 {
        return Ok(0);
    }
    let (d, dy) = adf_design(y, det, max_lag, max_lag + 1)?;
    let ssr = nested_ssr(&d, &dy)?;
    let n_eff = d.rows();
    let base = det.n_terms();
    let mut best = (f64::INFINITY, 0);
    for p in 0..=max_lag {
        let k = base + 1 + p;
        let crit = bic(ssr[k - 1], n_eff, k);
        if crit < best.0 {
            best = (crit, p);
        }
    }
    Ok(best.1)
}

/// Largest lag ceiling no bigger than the Schwert rule that leaves enough
/// observations.
pub(crate) fn feasible_max_lag(n: usize, det: DetSpec) -> usize {
    let mut m = schwert_max_lag(n);
    while m > 0 && check_room(n, det, m).is_err() {
        m -= 1;
    }
    m
}

/// ADF regression with BIC-selected lags, fitted on the largest sample.
pub fn adf_regression(y: &[f64], det: DetSpec) -> Result<(OlsFit, usize)> {
    let p = select_lags(y, feasible_max_lag(y.len(), det), det)?;
    let (d, dy) = adf_design(y, det, p, p + 1)?;
    Ok((ols(&d, &dy)?, p))
}

/// t-ratio on `y_{t-1}` for a fixed lag order.
pub fn adf_statistic(y: &[f64], det: DetSpec, p: usize) -> Result<f64> {
    check_room(y.len(), det, p)?;
    let (d, dy) = adf_design(y, det, p, p + 1)?;
    Ok(ols(&d, &dy)?.t_stat(det.n_terms()))
}

pub(super) fn adf(y: &[f64], det: DetSpec) -> Result<(f64, usize, BTreeMap<String, f64>)> {
    let (fit, p) = adf_regression(y, det)?;
    let j = det.n_terms();
    let stat = fit.t_stat(j);
    Ok((
        stat,
        p,
        aux(&[
            ("gamma", fit.coefficients[j]),
            ("se_gamma", fit.std_errors[j]),
            ("sigma2", fit.sigma2),
        ]),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schwert_rule() {
        assert_eq!(schwert_max_lag(100), 12);
        assert_eq!(schwert_max_lag(500), 17);
        assert_eq!(schwert_max_lag(60), 10);
    }

    #[test]
    fn zero_max_lag() {
        let y: Vec<f64> = (0..50).map(|i| ((i * 37) % 17) as f64).collect();
        assert_eq!(select_lags(&y, 0, DetSpec::Constant).unwrap(), 0);
    }

    #[test]
    fn too_short_for_max_lag() {
        let y: Vec<f64> = (0..12).map(|i| (i as f64).sin()).collect();
        assert!(matches!(
            select_lags(&y, 20, DetSpec::None),
            Err(Error::InsufficientLength { .. })
        ));
    }

    #[test]
    fn design_layout() {
        let y = [1.0, 3.0, 6.0, 10.0, 15.0, 21.0];
        let (d, dy) = adf_design(&y, DetSpec::ConstantAndTrend, 1, 2).unwrap();
        assert_eq!(dy, vec![3.0, 4.0, 5.0, 6.0]);
        assert_eq!(d.column(0), &[1.0; 4]);
        assert_eq!(d.column(1), &[3.0, 4.0, 5.0, 6.0]);
        assert_eq!(d.column(2), &[3.0, 6.0, 10.0, 15.0]);
        assert_eq!(d.column(3), &[2.0, 3.0, 4.0, 5.0]);
    }
}

//! Scalar characteristics of a series.

use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::urtests::{ols, Design};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population variance (divisor `n`).
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

fn central_moments(x: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() < 3 {
        return Err(Error::InsufficientLength { needed: 3, got: x.len() });
    }
    let m = mean(x);
    let n = x.len() as f64;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    if !(m2 > 1e-300) || m2 <= f64::EPSILON * m * m * 1e-4 {
        return Err(Error::DegenerateSeries("zero variance".into()));
    }
    Ok((m2, m3, m4))
}

/// Moment skewness `m3 / m2^1.5`.
pub fn skewness(x: &[f64]) -> Result<f64> {
    let (m2, m3, _) = central_moments(x)?;
    Ok(m3 / m2.powf(1.5))
}

/// Excess kurtosis `m4 / m2^2 - 3`.
pub fn kurtosis(x: &[f64]) -> Result<f64> {
    let (m2, _, m4) = central_moments(x)?;
    Ok(m4 / (m2 * m2) - 3.0)
}

/// Lag-1..=h sample autocorrelations.
pub fn autocorrelations(x: &[f64], h: usize) -> Result<Vec<f64>> {
    if x.len() <= h {
        return Err(Error::InsufficientLength { needed: h + 1, got: x.len() });
    }
    let m = mean(x);
    let d: Vec<f64> = x.iter().map(|v| v - m).collect();
    let c0: f64 = d.iter().map(|v| v * v).sum();
    if !(c0 > 0.0) {
        return Err(Error::DegenerateSeries("zero variance".into()));
    }
    Ok((1..=h)
        .map(|k| d[k..].iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() / c0)
        .collect())
}

pub const BOX_LAGS: usize = 12;

/// Box-Pierce `Q = n sum_{k=1}^{h} r_k^2`.
pub fn box_pierce(x: &[f64], h: usize) -> Result<f64> {
    let r = autocorrelations(x, h)?;
    Ok(x.len() as f64 * r.iter().map(|v| v * v).sum::<f64>())
}

/// Largest Lyapunov exponent with embedding dimension one: for each point,
/// take its nearest neighbour in value and average
/// `log(|x_{i+h} - x_{j+h}| / |x_i - x_j|) / h`.
pub fn lyapunov(x: &[f64], horizon: usize) -> Result<f64> {
    let n = x.len();
    if n < horizon + 3 {
        return Err(Error::InsufficientLength { needed: horizon + 3, got: n });
    }
    let m = n - horizon;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let mut sum = 0.0;
    let mut count = 0usize;
    for (pos, &i) in order.iter().enumerate() {
        let mut best: Option<(f64, usize)> = None;
        for cand in [pos.checked_sub(1), Some(pos + 1)].into_iter().flatten() {
            if let Some(&j) = order.get(cand) {
                let d = (x[i] - x[j]).abs();
                if best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, j));
                }
            }
        }
        if let Some((d0, j)) = best {
            let dh = (x[i + horizon] - x[j + horizon]).abs();
            if d0 > 0.0 && dh > 0.0 {
                sum += (dh / d0).ln();
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(Error::DegenerateSeries("no usable neighbour pairs".into()));
    }
    Ok(sum / count as f64 / horizon as f64)
}

/// Terasvirta neural-network nonlinearity test with one lag. The series is
/// standardised, the linear AR(1) residuals are regressed on the lag and its
/// square and cube, and `n ln(SSR0 / SSR1)` is returned (chi-squared with two
/// degrees of freedom under linearity).
pub fn terasvirta(x: &[f64]) -> Result<f64> {
    if x.len() < 10 {
        return Err(Error::InsufficientLength { needed: 10, got: x.len() });
    }
    let m = mean(x);
    let sd = variance(x).sqrt();
    if !(sd > 0.0) {
        return Err(Error::DegenerateSeries("zero variance".into()));
    }
    let z: Vec<f64> = x.iter().map(|v| (v - m) / sd).collect();
    let lag: Vec<f64> = z[..z.len() - 1].to_vec();
    let y = &z[1..];
    let n = y.len();
    let mut d0 = Design::new(n);
    d0.push_constant();
    d0.push(lag.clone())?;
    let fit0 = ols(&d0, y)?;
    let mut d1 = d0.clone();
    d1.push(lag.iter().map(|v| v * v).collect())?;
    d1.push(lag.iter().map(|v| v * v * v).collect())?;
    let fit1 = ols(&d1, &fit0.residuals)?;
    if !(fit1.ssr > 0.0) {
        return Err(Error::Numerical("zero residual variance".into()));
    }
    Ok(n as f64 * (fit0.ssr / fit1.ssr).ln())
}

/// Expected rescaled range of iid noise over a window of `n` points
/// (Anis-Lloyd with the Peters small-sample factor).
pub fn expected_rescaled_range(n: usize) -> f64 {
    let nf = n as f64;
    let sum: f64 = (1..n).map(|i| ((nf - i as f64) / i as f64).sqrt()).sum();
    let gamma_ratio = if n <= 340 {
        (ln_gamma((nf - 1.0) / 2.0) - ln_gamma(nf / 2.0)).exp() / std::f64::consts::PI.sqrt()
    } else {
        1.0 / (nf * std::f64::consts::FRAC_PI_2).sqrt()
    };
    (nf - 0.5) / nf * gamma_ratio * sum
}

fn rescaled_range(block: &[f64]) -> Option<f64> {
    let m = mean(block);
    let mut cum = 0.0;
    let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
    for v in block {
        cum += v - m;
        lo = lo.min(cum);
        hi = hi.max(cum);
    }
    let sd = variance(block).sqrt();
    (sd > 0.0).then(|| (hi - lo) / sd)
}

/// Hurst exponent by rescaled-range analysis over dyadic windows of at least
/// eight points. The log mean R/S is taken relative to its iid expectation,
/// so the estimate is `0.5 + slope`, which removes the well-known upward
/// small-window bias of the raw R/S slope.
pub fn hurst(x: &[f64]) -> Result<f64> {
    let n = x.len();
    if n < 32 {
        return Err(Error::InsufficientLength { needed: 32, got: n });
    }
    let mut logs_n = Vec::new();
    let mut logs_rs = Vec::new();
    let mut w = 8;
    while w <= n / 2 {
        let values: Vec<f64> = x.chunks_exact(w).filter_map(rescaled_range).collect();
        if !values.is_empty() {
            let rs = mean(&values);
            logs_n.push((w as f64).ln());
            logs_rs.push(rs.ln() - expected_rescaled_range(w).ln());
        }
        w *= 2;
    }
    if logs_n.len() < 2 {
        return Err(Error::DegenerateSeries("too few usable windows".into()));
    }
    let mx = mean(&logs_n);
    let my = mean(&logs_rs);
    let sxy: f64 = logs_n.iter().zip(&logs_rs).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = logs_n.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(0.5 + sxy / sxx)
}

/// `Var(dy) / Var(y)`.
pub fn var_ratio(x: &[f64]) -> Result<f64> {
    if x.len() < 3 {
        return Err(Error::InsufficientLength { needed: 3, got: x.len() });
    }
    let v = variance(x);
    if !(v > 0.0) {
        return Err(Error::DegenerateSeries("zero variance".into()));
    }
    let d: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(variance(&d) / v)
}

/// `1 - Var(remainder) / Var(remainder + component)`, clipped to `[0, 1]`.
pub fn strength(remainder: &[f64], component: &[f64]) -> f64 {
    let combined: Vec<f64> = remainder.iter().zip(component).map(|(r, c)| r + c).collect();
    let vc = variance(&combined);
    if !(vc > 0.0) {
        return 0.0;
    }
    (1.0 - variance(remainder) / vc).clamp(0.0, 1.0)
}

/// OLS slope of the series on a linear time index: estimate, standard error
/// and two-sided p-value.
pub fn trend_regression(x: &[f64]) -> Result<(f64, f64, f64)> {
    let n = x.len();
    let mut d = Design::new(n);
    d.push_constant();
    d.push((1..=n).map(|t| t as f64).collect())?;
    let fit = ols(&d, x)?;
    let est = fit.coefficients[1];
    let se = fit.std_errors[1];
    let p = if se > 0.0 {
        let dist = StudentsT::new(0.0, 1.0, (n - 2) as f64).map_err(|e| Error::Numerical(e.to_string()))?;
        2.0 * dist.sf((est / se).abs())
    } else {
        0.0
    };
    Ok((est, se, p))
}

//! Zivot-Andrews minimum-t test with a break in intercept and trend.

use std::collections::BTreeMap;

use super::adf::{adf_design, feasible_max_lag, select_lags};
use super::ols::ols;
use super::{aux, DetSpec};
use crate::error::{Error, Result};

/// Candidate break dates (one-based; the break takes effect after `tb`)
/// covering `[0.15 T, 0.85 T]`.
pub fn za_break_range(n: usize) -> (usize, usize) {
    let lo = ((0.15 * n as f64).ceil() as usize).max(2);
    let hi = ((0.85 * n as f64).floor() as usize).min(n - 2);
    (lo, hi)
}

/// Direct OLS t-ratio on `y_{t-1}` for one break date and lag order.
pub fn za_candidate_statistic(y: &[f64], p: usize, tb: usize) -> Result<f64> {
    let (mut d, dy) = adf_design(y, DetSpec::ConstantAndTrend, p, p + 1)?;
    let times: Vec<usize> = (p + 1..y.len()).map(|t| t + 1).collect();
    d.push(times.iter().map(|&t| if t > tb { 1.0 } else { 0.0 }).collect())?;
    d.push(times.iter().map(|&t| if t > tb { (t - tb) as f64 } else { 0.0 }).collect())?;
    Ok(ols(&d, &dy)?.t_stat(2))
}

/// Cholesky factor of a symmetric positive definite matrix (row-major).
fn cholesky(a: &[f64], k: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..=i {
            let mut s = a[i * k + j];
            for m in 0..j {
                s -= l[i * k + m] * l[j * k + m];
            }
            if i == j {
                if s <= 1e-12 {
                    return None;
                }
                l[i * k + i] = s.sqrt();
            } else {
                l[i * k + j] = s / l[j * k + j];
            }
        }
    }
    Some(l)
}

fn forward(l: &[f64], k: usize, b: &[f64]) -> Vec<f64> {
    let mut z = vec![0.0; k];
    for i in 0..k {
        let mut s = b[i];
        for m in 0..i {
            s -= l[i * k + m] * z[m];
        }
        z[i] = s / l[i * k + i];
    }
    z
}

fn backward(l: &[f64], k: usize, z: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = z[i];
        for m in i + 1..k {
            s -= l[m * k + i] * x[m];
        }
        x[i] = s / l[i * k + i];
    }
    x
}

/// Minimum t-ratio over break dates. The normal equations for every
/// candidate are assembled from suffix sums of the break-free design, so
/// each candidate costs O(k^3) instead of a full regression.
pub(super) fn zivot_andrews(y: &[f64]) -> Result<(f64, usize, BTreeMap<String, f64>)> {
    let n = y.len();
    let p = select_lags(y, feasible_max_lag(n, DetSpec::ConstantAndTrend), DetSpec::ConstantAndTrend)?;
    let (d, dy) = adf_design(y, DetSpec::ConstantAndTrend, p, p + 1)?;
    let rows = d.rows();
    let kb = d.cols();
    let k = kb + 2;
    if rows <= k {
        return Err(Error::InsufficientLength { needed: k + p + 2, got: n });
    }
    // Column 1 of the design is the one-based time index.
    let time = d.column(1).to_vec();
    let mut gram = vec![0.0; kb * kb];
    let mut xty = vec![0.0; kb];
    for a in 0..kb {
        for b in a..kb {
            let v: f64 = d.column(a).iter().zip(d.column(b)).map(|(x, y)| x * y).sum();
            gram[a * kb + b] = v;
            gram[b * kb + a] = v;
        }
        xty[a] = d.column(a).iter().zip(&dy).map(|(x, y)| x * y).sum();
    }
    let yy: f64 = dy.iter().map(|v| v * v).sum();

    // Suffix sums of each column (and dy as the last entry), plain and
    // weighted by time.
    let m = kb + 1;
    let mut s = vec![0.0; (rows + 1) * m];
    let mut st = vec![0.0; (rows + 1) * m];
    for r in (0..rows).rev() {
        for c in 0..m {
            let v = if c < kb { d.get(r, c) } else { dy[r] };
            s[r * m + c] = s[(r + 1) * m + c] + v;
            st[r * m + c] = st[(r + 1) * m + c] + v * time[r];
        }
    }

    let (lo, hi) = za_break_range(n);
    let mut best: Option<(f64, usize)> = None;
    let mut a = vec![0.0; k * k];
    let mut rhs = vec![0.0; k];
    for tb in lo..=hi {
        let tbf = tb as f64;
        // First row whose time exceeds the break.
        let r0 = time.partition_point(|&t| t <= tbf);
        let cnt = (rows - r0) as f64;
        if r0 == 0 || cnt < 2.0 {
            continue;
        }
        let su = |c: usize| s[r0 * m + c];
        let sut = |c: usize| st[r0 * m + c] - tbf * s[r0 * m + c];
        for i in 0..kb {
            for j in 0..kb {
                a[i * k + j] = gram[i * kb + j];
            }
            a[i * k + kb] = su(i);
            a[kb * k + i] = su(i);
            a[i * k + kb + 1] = sut(i);
            a[(kb + 1) * k + i] = sut(i);
            rhs[i] = xty[i];
        }
        let sum_t = s[r0 * m + 1];
        let sum_t2 = st[r0 * m + 1];
        a[kb * k + kb] = cnt;
        let dudt = sum_t - tbf * cnt;
        a[kb * k + kb + 1] = dudt;
        a[(kb + 1) * k + kb] = dudt;
        a[(kb + 1) * k + kb + 1] = sum_t2 - 2.0 * tbf * sum_t + tbf * tbf * cnt;
        rhs[kb] = su(kb);
        rhs[kb + 1] = sut(kb);

        let scale: Vec<f64> = (0..k).map(|i| a[i * k + i].sqrt()).collect();
        let mut scaled = a.clone();
        for i in 0..k {
            for j in 0..k {
                scaled[i * k + j] /= scale[i] * scale[j];
            }
        }
        let Some(l) = cholesky(&scaled, k) else { continue };
        let b_rhs: Vec<f64> = (0..k).map(|i| rhs[i] / scale[i]).collect();
        let bs = backward(&l, k, &forward(&l, k, &b_rhs));
        let beta: Vec<f64> = (0..k).map(|i| bs[i] / scale[i]).collect();
        let ssr = (yy - (0..k).map(|i| beta[i] * rhs[i]).sum::<f64>()).max(0.0);
        let sigma2 = ssr / (rows - k) as f64;
        let mut e = vec![0.0; k];
        e[2] = 1.0;
        let z = forward(&l, k, &e);
        let inv22 = z.iter().map(|v| v * v).sum::<f64>() / (scale[2] * scale[2]);
        let t = beta[2] / (sigma2 * inv22).sqrt();
        if t.is_finite() && best.map_or(true, |(bt, _)| t < bt) {
            best = Some((t, tb));
        }
    }
    let (stat, tb) = best.ok_or_else(|| Error::Numerical("no admissible break date".into()))?;
    Ok((stat, p, aux(&[("break_date", tb as f64)])))
}

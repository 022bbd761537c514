//! Seasonal-trend decomposition by loess (additive, non-robust).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StlResult {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub remainder: Vec<f64>,
    pub period: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StlParams {
    pub seasonal_window: usize,
    pub trend_window: usize,
    pub lowpass_window: usize,
    pub inner_loops: usize,
}

fn next_odd(x: f64) -> usize {
    let v = x.ceil() as usize;
    if v % 2 == 0 {
        v + 1
    } else {
        v
    }
}

impl StlParams {
    /// Seasonal window 13, trend window from the usual odd-window rule
    /// `1.5 p / (1 - 1.5 / n_s)`, low-pass window the next odd number after
    /// the period, and two inner passes.
    pub fn for_period(period: usize) -> Self {
        let seasonal_window = 13;
        StlParams {
            seasonal_window,
            trend_window: next_odd(1.5 * period as f64 / (1.0 - 1.5 / seasonal_window as f64)),
            lowpass_window: next_odd(period as f64 + 0.5),
            inner_loops: 2,
        }
    }
}

fn tricube(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        let a = 1.0 - u * u * u;
        a * a * a
    }
}

/// Local-linear loess fit of `y` (at positions `0..n`) evaluated at `x`
/// with a span of `q` points.
fn loess_at(y: &[f64], q: usize, x: f64) -> f64 {
    let n = y.len();
    let (lo, hi, h) = if q >= n {
        let h = x.max(n as f64 - 1.0 - x).max(x.abs()) + (q - n) as f64 / 2.0;
        (0, n - 1, h)
    } else {
        let start = (x - (q as f64 - 1.0) / 2.0).round().clamp(0.0, (n - q) as f64) as usize;
        let h = (x - start as f64).max((start + q - 1) as f64 - x);
        (start, start + q - 1, h)
    };
    let h = h.max(0.5);
    let (mut sw, mut swx, mut swy) = (0.0, 0.0, 0.0);
    let mut weights = Vec::with_capacity(hi - lo + 1);
    for i in lo..=hi {
        let r = (i as f64 - x).abs();
        let w = if r <= 0.001 * h { 1.0 } else if r <= 0.999 * h { tricube(r / h) } else { 0.0 };
        weights.push(w);
        sw += w;
        swx += w * i as f64;
        swy += w * y[i];
    }
    if sw <= 0.0 {
        return y[x.round().clamp(0.0, (n - 1) as f64) as usize];
    }
    let xbar = swx / sw;
    let ybar = swy / sw;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (i, w) in (lo..=hi).zip(&weights) {
        let dx = i as f64 - xbar;
        sxx += w * dx * dx;
        sxy += w * dx * (y[i] - ybar);
    }
    let range = (hi - lo) as f64;
    if sxx > 1e-6 * range * range * sw {
        ybar + sxy / sxx * (x - xbar)
    } else {
        ybar
    }
}

fn loess(y: &[f64], q: usize) -> Vec<f64> {
    (0..y.len()).map(|i| loess_at(y, q, i as f64)).collect()
}

fn moving_average(x: &[f64], w: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len() + 1 - w);
    let mut s: f64 = x[..w].iter().sum();
    out.push(s / w as f64);
    for i in w..x.len() {
        s += x[i] - x[i - w];
        out.push(s / w as f64);
    }
    out
}

pub fn stl_decompose(series: &[f64], period: usize) -> Result<StlResult> {
    stl_with_params(series, period, StlParams::for_period(period))
}

pub fn stl_with_params(y: &[f64], period: usize, params: StlParams) -> Result<StlResult> {
    if period < 2 {
        return Err(Error::InvalidConfig(format!("STL period must be at least 2, got {period}")));
    }
    let n = y.len();
    if n < 2 * period {
        return Err(Error::InsufficientLength { needed: 2 * period, got: n });
    }
    let np = period;
    let mut trend = vec![0.0; n];
    let mut seasonal = vec![0.0; n];
    let mut cycle = vec![0.0; n + 2 * np];
    for _ in 0..params.inner_loops {
        let detrended: Vec<f64> = y.iter().zip(&trend).map(|(a, b)| a - b).collect();
        for k in 0..np {
            let sub: Vec<f64> = detrended[k..].iter().step_by(np).copied().collect();
            let m = sub.len();
            for j in 0..m + 2 {
                let x = j as f64 - 1.0;
                cycle[j * np + k] = loess_at(&sub, params.seasonal_window, x);
            }
        }
        let low = moving_average(&moving_average(&moving_average(&cycle, np), np), 3);
        let low = loess(&low, params.lowpass_window);
        for t in 0..n {
            seasonal[t] = cycle[np + t] - low[t];
        }
        let adjusted: Vec<f64> = y.iter().zip(&seasonal).map(|(a, b)| a - b).collect();
        trend = loess(&adjusted, params.trend_window);
    }
    // Move each cycle's seasonal mean into the trend so the seasonal
    // component averages to zero over every full cycle.
    let full = n / np;
    let mut last_mean = 0.0;
    for c in 0..n.div_ceil(np) {
        let range = c * np..((c + 1) * np).min(n);
        if c < full {
            last_mean = seasonal[range.clone()].iter().sum::<f64>() / np as f64;
        }
        for t in range {
            seasonal[t] -= last_mean;
            trend[t] += last_mean;
        }
    }
    let remainder = (0..n).map(|t| y[t] - trend[t] - seasonal[t]).collect();
    Ok(StlResult {
        trend,
        seasonal,
        remainder,
        period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_windows() {
        let p = StlParams::for_period(12);
        assert_eq!((p.seasonal_window, p.trend_window, p.lowpass_window), (13, 21, 13));
    }

    #[test]
    fn sine_plus_ramp() {
        let n = 240;
        let y: Vec<f64> = (0..n)
            .map(|t| (2.0 * std::f64::consts::PI * t as f64 / 12.0).sin() + 0.05 * t as f64)
            .collect();
        let r = stl_decompose(&y, 12).unwrap();
        for t in 24..n - 24 {
            let s = (2.0 * std::f64::consts::PI * t as f64 / 12.0).sin();
            assert!((r.seasonal[t] - s).abs() < 0.05, "seasonal at {t}: {}", r.seasonal[t]);
            assert!((r.trend[t] - 0.05 * t as f64).abs() < 0.05, "trend at {t}");
        }
    }

    #[test]
    fn constant_input() {
        let r = stl_decompose(&[7.0; 60], 12).unwrap();
        assert!(r.seasonal.iter().all(|v| v.abs() < 1e-6));
        assert!(r.remainder.iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn too_short() {
        assert!(matches!(
            stl_decompose(&[1.0; 20], 12),
            Err(Error::InsufficientLength { .. })
        ));
    }

    #[test]
    fn identity_and_zero_cycle_means() {
        let y: Vec<f64> = (0..100).map(|t| ((t * 37 % 23) as f64).sqrt() + (t as f64 * 0.7).cos()).collect();
        let r = stl_decompose(&y, 12).unwrap();
        for t in 0..100 {
            assert!((r.trend[t] + r.seasonal[t] + r.remainder[t] - y[t]).abs() < 1e-8);
        }
        for c in 0..100 / 12 {
            let m: f64 = r.seasonal[c * 12..(c + 1) * 12].iter().sum::<f64>() / 12.0;
            assert!(m.abs() < 1e-6);
        }
    }
}

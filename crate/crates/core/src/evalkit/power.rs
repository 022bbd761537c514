//! Rejection rates of the unit-root null along a grid of AR coefficients.
//!
//! Series follow `y_t = phi y_{t-1} + e_t` from `y_1 = 0`. Classical tests
//! use an empirical critical value so that the rejection rate at `phi = 1`
//! is `alpha` by construction; models reject when their unit-root score
//! falls below a probability threshold.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{predict_proba, EnsembleModel};
use crate::rng::derive_seed;
use crate::sim::{simulate_series, DgpForm, DgpSpec};
use crate::tsfeatures::features_for_series;
use crate::urtests::{quantile, raw_statistic, DetSpec, DetSpecPolicy, TestId};

pub enum PowerTarget<'a> {
    Test { test: TestId, det: DetSpec },
    Model { model: &'a EnsembleModel, threshold: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerPoint {
    pub phi: f64,
    pub rejection_rate: f64,
    /// Replications whose statistic or score could not be computed; they
    /// count as non-rejections.
    pub n_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCurve {
    pub target: String,
    pub n_periods: usize,
    pub n_reps: usize,
    /// Empirical critical value (tests) or probability threshold (models).
    pub cutoff: f64,
    pub points: Vec<PowerPoint>,
}

/// `0.85, 0.855, ..., 1.0`.
pub fn default_phi_grid() -> Vec<f64> {
    (0..=30).map(|i| ((850 + 5 * i) as f64 / 1000.0).min(1.0)).collect()
}

const CALIBRATION_STREAM: u64 = 0;
const GRID_STREAM: u64 = 1;

/// Statistic-scale cut below which a series counts as near unit root:
/// the `alpha` quantile of the statistic under `phi = 1`. This is the
/// lower tail for every test, KPSS included, since all nine statistics
/// shrink as the series becomes more stationary.
pub fn empirical_cutoff(test: TestId, det: DetSpec, n: usize, n_reps: usize, alpha: f64, seed: u64) -> Result<f64> {
    let mut stats: Vec<f64> = (0..n_reps as u64)
        .into_par_iter()
        .filter_map(|rep| {
            let spec = DgpSpec::plain(1.0, n, derive_seed(seed, CALIBRATION_STREAM, rep));
            let y = simulate_series(&spec).ok()?.values;
            raw_statistic(test, &y, det).ok().map(|r| r.0).filter(|v| v.is_finite())
        })
        .collect();
    if stats.len() < n_reps / 2 {
        return Err(Error::Numerical(format!(
            "{}: only {} of {} null statistics computable",
            test.name(),
            stats.len(),
            n_reps
        )));
    }
    stats.sort_by(f64::total_cmp);
    Ok(quantile(&stats, alpha))
}

pub fn power_curve(
    target: &PowerTarget,
    phi_grid: &[f64],
    n: usize,
    n_reps: usize,
    alpha: f64,
    seed: u64,
) -> Result<PowerCurve> {
    if n_reps < 500 {
        return Err(Error::InvalidConfig(format!("power curves need at least 500 replications, got {n_reps}")));
    }
    if phi_grid.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
        return Err(Error::InvalidConfig("phi grid must lie in (0, 1]".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let (name, cutoff) = match target {
        PowerTarget::Test { test, det } => {
            let det = test.clamp_det_spec(*det);
            (
                format!("{}_{}", test.name(), det.name()),
                empirical_cutoff(*test, det, n, n_reps, alpha, seed)?,
            )
        }
        PowerTarget::Model { model, threshold } => (model.kind().to_string(), *threshold),
    };
    let policy = DetSpecPolicy::TrueDgp(DgpForm::Plain);
    // Same innovations at every phi (common random numbers).
    let reject = |phi: f64, rep: u64| -> Option<bool> {
        let spec = DgpSpec::plain(phi, n, derive_seed(seed, GRID_STREAM, rep));
        let y = simulate_series(&spec).ok()?.values;
        match target {
            PowerTarget::Test { test, det } => {
                let s = raw_statistic(*test, &y, test.clamp_det_spec(*det)).ok()?.0;
                s.is_finite().then_some(s < cutoff)
            }
            PowerTarget::Model { model, .. } => {
                let f = features_for_series(&y, &policy).ok()?;
                let p = predict_proba(model, &f.values).ok()?;
                Some(p.probability_positive < cutoff)
            }
        }
    };
    let points = phi_grid
        .iter()
        .map(|&phi| {
            let outcomes: Vec<Option<bool>> = (0..n_reps as u64).into_par_iter().map(|r| reject(phi, r)).collect();
            let rejected = outcomes.iter().filter(|o| **o == Some(true)).count();
            PowerPoint {
                phi,
                rejection_rate: rejected as f64 / n_reps as f64,
                n_failed: outcomes.iter().filter(|o| o.is_none()).count(),
            }
        })
        .collect();
    Ok(PowerCurve {
        target: name,
        n_periods: n,
        n_reps,
        cutoff,
        points,
    })
}

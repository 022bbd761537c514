//! Feature bank for the classifiers.
//!
//! A [`FeatureVector`] holds the nine test statistics followed by
//! distributional, dependence and decomposition features of the level
//! series, its first difference and their STL remainders. Entries that
//! cannot be computed are stored as NaN and flagged invalid.

pub mod stats;
pub mod stl;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::urtests::{compute_all, DetSpecPolicy, TestId, TestOutcome};

pub use stl::{stl_decompose, StlParams, StlResult};

/// Bumped whenever the layout of [`FEATURE_NAMES`] changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Fixed monthly frequency.
pub const FREQUENCY: usize = 12;

pub const FEATURE_NAMES: [&str; 36] = [
    "ADF",
    "PP",
    "KPSS",
    "PGFF",
    "BREIT",
    "ERSd",
    "ERSp",
    "URSP",
    "URZA",
    "skew",
    "kurt",
    "box",
    "lyapunov",
    "tnn",
    "hurst",
    "trend_strength",
    "seasonal_strength",
    "diff_skew",
    "diff_kurt",
    "diff_box",
    "diff_lyapunov",
    "diff_tnn",
    "stl_tnn",
    "stl_skew",
    "stl_kurt",
    "stl_box",
    "stl_diff_tnn",
    "stl_diff_skew",
    "stl_diff_kurt",
    "stl_diff_box",
    "length",
    "frequency",
    "var_ratio",
    "trend_est",
    "trend_se",
    "trend_pval",
];

pub const N_FEATURES: usize = FEATURE_NAMES.len();

pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES.iter().position(|n| *n == name)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    /// Values in [`FEATURE_NAMES`] order; NaN where invalid.
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        feature_index(name).map(|i| self.values[i])
    }

    pub fn n_invalid(&self) -> usize {
        self.valid.iter().filter(|v| !**v).count()
    }
}

struct Builder {
    values: Vec<f64>,
    valid: Vec<bool>,
}

impl Builder {
    fn push(&mut self, r: Result<f64>) {
        match r {
            Ok(v) if v.is_finite() => {
                self.values.push(v);
                self.valid.push(true);
            }
            _ => {
                self.values.push(f64::NAN);
                self.valid.push(false);
            }
        }
    }

    fn push_invalid(&mut self, k: usize) {
        for _ in 0..k {
            self.push(Err(Error::EmptyInput("skipped".into())));
        }
    }
}

fn push_remainder_features(b: &mut Builder, x: &[f64]) {
    match stl_decompose(x, FREQUENCY) {
        Ok(d) => {
            b.push(stats::terasvirta(&d.remainder));
            b.push(stats::skewness(&d.remainder));
            b.push(stats::kurtosis(&d.remainder));
            b.push(stats::box_pierce(&d.remainder, stats::BOX_LAGS));
        }
        Err(_) => b.push_invalid(4),
    }
}

/// Build the feature vector of `series` from its test results (as returned
/// by [`compute_all`]).
pub fn extract_features(series: &[f64], tests: &[TestOutcome]) -> Result<FeatureVector> {
    if tests.len() != TestId::ALL.len() {
        return Err(Error::Schema(format!("expected 9 test results, got {}", tests.len())));
    }
    if series.len() < 2 {
        return Err(Error::InsufficientLength { needed: 2, got: series.len() });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateSeries("non-finite values".into()));
    }
    let mut b = Builder {
        values: Vec::with_capacity(N_FEATURES),
        valid: Vec::with_capacity(N_FEATURES),
    };
    for (t, outcome) in TestId::ALL.iter().zip(tests) {
        match outcome {
            Ok(r) if r.test == *t => b.push(Ok(r.statistic)),
            Ok(r) => {
                return Err(Error::Schema(format!("expected {} in position, got {}", t.name(), r.test.name())));
            }
            Err(_) => b.push_invalid(1),
        }
    }

    let diff: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    b.push(stats::skewness(series));
    b.push(stats::kurtosis(series));
    b.push(stats::box_pierce(series, stats::BOX_LAGS));
    b.push(stats::lyapunov(series, FREQUENCY));
    b.push(stats::terasvirta(series));
    b.push(stats::hurst(series));
    match stl_decompose(series, FREQUENCY) {
        Ok(d) => {
            b.push(Ok(stats::strength(&d.remainder, &d.trend)));
            b.push(Ok(stats::strength(&d.remainder, &d.seasonal)));
        }
        Err(_) => b.push_invalid(2),
    }
    b.push(stats::skewness(&diff));
    b.push(stats::kurtosis(&diff));
    b.push(stats::box_pierce(&diff, stats::BOX_LAGS));
    b.push(stats::lyapunov(&diff, FREQUENCY));
    b.push(stats::terasvirta(&diff));
    push_remainder_features(&mut b, series);
    push_remainder_features(&mut b, &diff);
    b.push(Ok(series.len() as f64));
    b.push(Ok(FREQUENCY as f64));
    b.push(stats::var_ratio(series));
    match stats::trend_regression(series) {
        Ok((est, se, p)) => {
            b.push(Ok(est));
            b.push(Ok(se));
            b.push(Ok(p));
        }
        Err(_) => b.push_invalid(3),
    }
    debug_assert_eq!(b.values.len(), N_FEATURES);
    Ok(FeatureVector {
        values: b.values,
        valid: b.valid,
    })
}

/// Test statistics under `policy` followed by [`extract_features`].
pub fn features_for_series(series: &[f64], policy: &DetSpecPolicy) -> Result<FeatureVector> {
    extract_features(series, &compute_all(series, policy))
}

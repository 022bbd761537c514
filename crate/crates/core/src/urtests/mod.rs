//! Classical unit-root and stationarity statistics.
//!
//! Nine tests are implemented from their textbook definitions. Each one is
//! computed under a deterministic specification ([`DetSpec`]) and compared to
//! an embedded 5% critical value. All tests except KPSS reject the unit-root
//! null in the left tail; KPSS tests the stationarity null and rejects in the
//! right tail.

mod adf;
mod breitung;
pub mod critical;
mod ers;
mod kpss;
pub mod ols;
mod pgff;
mod pp;
mod sp;
mod za;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::sim::{simulate_series, DgpForm, DgpSpec, SeriesLabel};

pub use adf::{adf_design, adf_statistic, schwert_max_lag, select_lags};
pub use ers::gls_detrend;
pub use ols::{ols, Design, OlsFit};
pub use za::{za_candidate_statistic, za_break_range};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TestId {
    Adf,
    Pp,
    Kpss,
    Pgff,
    Breitung,
    ErsD,
    ErsP,
    Ursp,
    Urza,
}

impl TestId {
    pub const ALL: [TestId; 9] = [
        TestId::Adf,
        TestId::Pp,
        TestId::Kpss,
        TestId::Pgff,
        TestId::Breitung,
        TestId::ErsD,
        TestId::ErsP,
        TestId::Ursp,
        TestId::Urza,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestId::Adf => "ADF",
            TestId::Pp => "PP",
            TestId::Kpss => "KPSS",
            TestId::Pgff => "PGFF",
            TestId::Breitung => "BREIT",
            TestId::ErsD => "ERSd",
            TestId::ErsP => "ERSp",
            TestId::Ursp => "URSP",
            TestId::Urza => "URZA",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let up = s.to_ascii_uppercase();
        TestId::ALL
            .into_iter()
            .find(|t| t.name().to_ascii_uppercase() == up)
            .or(match up.as_str() {
                "BREITUNG" => Some(TestId::Breitung),
                "ERS-D" => Some(TestId::ErsD),
                "ERS-P" => Some(TestId::ErsP),
                _ => None,
            })
    }

    /// True when small values reject the null.
    pub fn left_tail(self) -> bool {
        self != TestId::Kpss
    }

    /// Null hypothesis is a unit root (everything except KPSS).
    pub fn null_is_unit_root(self) -> bool {
        self != TestId::Kpss
    }

    pub fn allowed_det_specs(self) -> &'static [DetSpec] {
        use DetSpec::*;
        match self {
            TestId::Adf | TestId::Pgff | TestId::Breitung => &[None, Constant, ConstantAndTrend],
            TestId::Pp | TestId::Kpss | TestId::ErsD | TestId::ErsP => &[Constant, ConstantAndTrend],
            TestId::Ursp | TestId::Urza => &[ConstantAndTrend],
        }
    }

    /// Nearest allowed specification, adding deterministic terms when needed.
    pub fn clamp_det_spec(self, det: DetSpec) -> DetSpec {
        let allowed = self.allowed_det_specs();
        if allowed.contains(&det) {
            return det;
        }
        match det {
            DetSpec::None if allowed.contains(&DetSpec::Constant) => DetSpec::Constant,
            _ => DetSpec::ConstantAndTrend,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DetSpec {
    None,
    Constant,
    ConstantAndTrend,
}

impl DetSpec {
    pub fn name(self) -> &'static str {
        match self {
            DetSpec::None => "none",
            DetSpec::Constant => "constant",
            DetSpec::ConstantAndTrend => "trend",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "none" => Some(DetSpec::None),
            "constant" | "drift" => Some(DetSpec::Constant),
            "trend" | "constant_trend" => Some(DetSpec::ConstantAndTrend),
            _ => None,
        }
    }

    /// Number of deterministic regressors.
    pub fn n_terms(self) -> usize {
        match self {
            DetSpec::None => 0,
            DetSpec::Constant => 1,
            DetSpec::ConstantAndTrend => 2,
        }
    }

    /// Specification matching a data generating process.
    pub fn for_dgp(form: DgpForm) -> Self {
        match form {
            DgpForm::WithDriftAndTrend => DetSpec::ConstantAndTrend,
            DgpForm::WithDrift => DetSpec::Constant,
            DgpForm::Plain => DetSpec::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test: TestId,
    pub statistic: f64,
    pub det_spec: DetSpec,
    pub lags_used: usize,
    pub critical_value_5pct: f64,
    pub reject_null_5pct: bool,
    /// Named intermediates such as the regression estimate and its standard error.
    pub aux: BTreeMap<String, f64>,
}

impl TestResult {
    fn new(test: TestId, det: DetSpec, n: usize, statistic: f64, lags: usize, aux: BTreeMap<String, f64>) -> Result<Self> {
        if !statistic.is_finite() {
            return Err(Error::Numerical(format!("{} statistic is not finite", test.name())));
        }
        let cv = critical::critical_value(test, det, n, 0.05)?;
        Ok(TestResult {
            test,
            statistic,
            det_spec: det,
            lags_used: lags,
            critical_value_5pct: cv,
            reject_null_5pct: rejects(test, statistic, cv),
            aux,
        })
    }

    /// Class implied by the 5% decision.
    pub fn predicted_label(&self) -> SeriesLabel {
        predicted_label(self.test, self.reject_null_5pct)
    }
}

pub fn rejects(test: TestId, statistic: f64, critical_value: f64) -> bool {
    if test.left_tail() {
        statistic < critical_value
    } else {
        statistic > critical_value
    }
}

/// Class implied by a rejection decision of `test`.
pub fn predicted_label(test: TestId, reject: bool) -> SeriesLabel {
    if reject == test.null_is_unit_root() {
        SeriesLabel::NearUnitRoot
    } else {
        SeriesLabel::UnitRoot
    }
}

/// A statistic that could not be computed for a series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingStatistic {
    pub test: TestId,
    pub reason: String,
}

pub type TestOutcome = std::result::Result<TestResult, MissingStatistic>;

/// Minimum series length accepted by [`compute_statistic`].
pub const MIN_LENGTH: usize = 24;

pub(crate) fn aux(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub(crate) fn validate_series(series: &[f64]) -> Result<()> {
    if series.len() < MIN_LENGTH {
        return Err(Error::InsufficientLength {
            needed: MIN_LENGTH,
            got: series.len(),
        });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateSeries("non-finite values".into()));
    }
    let first = series[0];
    if series.iter().all(|&v| v == first) {
        return Err(Error::DegenerateSeries("constant series".into()));
    }
    Ok(())
}

/// Bandwidth for Bartlett long-run variances: `floor(4 (T/100)^(2/9))`.
pub fn bartlett_bandwidth(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

/// Newey-West long-run variance with Bartlett weights, autocovariances
/// normalised by the number of residuals.
pub fn long_run_variance(resid: &[f64], bandwidth: usize) -> f64 {
    let n = resid.len() as f64;
    let gamma = |j: usize| -> f64 {
        resid[j..]
            .iter()
            .zip(resid.iter())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n
    };
    let mut lrv = gamma(0);
    for j in 1..=bandwidth.min(resid.len().saturating_sub(1)) {
        let w = 1.0 - j as f64 / (bandwidth as f64 + 1.0);
        lrv += 2.0 * w * gamma(j);
    }
    lrv
}

/// Residuals of `y` after removing the deterministic terms by OLS.
pub fn detrend(y: &[f64], det: DetSpec) -> Result<Vec<f64>> {
    match det {
        DetSpec::None => Ok(y.to_vec()),
        DetSpec::Constant => {
            let mean = y.iter().sum::<f64>() / y.len() as f64;
            Ok(y.iter().map(|v| v - mean).collect())
        }
        DetSpec::ConstantAndTrend => {
            let mut d = Design::new(y.len());
            d.push_constant();
            d.push((1..=y.len()).map(|t| t as f64).collect())?;
            Ok(ols(&d, y)?.residuals)
        }
    }
}

/// Statistic, lag count and intermediates without the critical-value lookup.
pub fn raw_statistic(test: TestId, series: &[f64], det: DetSpec) -> Result<(f64, usize, BTreeMap<String, f64>)> {
    validate_series(series)?;
    if !test.allowed_det_specs().contains(&det) {
        return Err(Error::UnsupportedDetSpec {
            test: test.name().into(),
            det: det.name().into(),
        });
    }
    let (stat, lags, aux) = match test {
        TestId::Adf => adf::adf(series, det)?,
        TestId::Pp => pp::pp(series, det)?,
        TestId::Kpss => kpss::kpss(series, det)?,
        TestId::Pgff => pgff::pgff(series, det)?,
        TestId::Breitung => breitung::breitung(series, det)?,
        TestId::ErsD => ers::ers_dfgls(series, det)?,
        TestId::ErsP => ers::ers_point_optimal(series, det)?,
        TestId::Ursp => sp::schmidt_phillips(series)?,
        TestId::Urza => za::zivot_andrews(series)?,
    };
    if !stat.is_finite() {
        return Err(Error::Numerical(format!("{} statistic is not finite", test.name())));
    }
    Ok((stat, lags, aux))
}

/// Compute one statistic.
pub fn compute_statistic(test: TestId, series: &[f64], det: DetSpec) -> Result<TestResult> {
    let (stat, lags, aux) = raw_statistic(test, series, det)?;
    TestResult::new(test, det, series.len(), stat, lags, aux)
}

/// How deterministic terms are chosen for each test.
#[derive(Debug, Clone, PartialEq)]
pub enum DetSpecPolicy {
    /// The specification matching the generating process (baseline mode).
    TrueDgp(DgpForm),
    /// One specification for every test (feature mode).
    Uniform(DetSpec),
}

impl DetSpecPolicy {
    pub fn for_test(&self, test: TestId) -> DetSpec {
        let det = match self {
            DetSpecPolicy::TrueDgp(form) => DetSpec::for_dgp(*form),
            DetSpecPolicy::Uniform(det) => *det,
        };
        test.clamp_det_spec(det)
    }
}

impl From<&DgpSpec> for DetSpecPolicy {
    fn from(spec: &DgpSpec) -> Self {
        DetSpecPolicy::TrueDgp(spec.dgp_form)
    }
}

/// All nine statistics, in [`TestId::ALL`] order. Failures are recorded per
/// test rather than aborting.
pub fn compute_all(series: &[f64], policy: &DetSpecPolicy) -> Vec<TestOutcome> {
    TestId::ALL
        .iter()
        .map(|&test| {
            compute_statistic(test, series, policy.for_test(test)).map_err(|e| MissingStatistic {
                test,
                reason: e.to_string(),
            })
        })
        .collect()
}

/// Generating process under each test's null at length `n`.
pub fn null_spec(test: TestId, n: usize, seed: u64) -> DgpSpec {
    let phi = if test.null_is_unit_root() { 1.0 } else { 0.0 };
    DgpSpec::plain(phi, n, seed)
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Null-distribution statistics of `test` at length `n`, one per replication.
pub fn simulate_null_statistics(test: TestId, det: DetSpec, n: usize, n_reps: usize, seed: u64) -> Result<Vec<f64>> {
    (0..n_reps as u64)
        .into_par_iter()
        .map(|rep| {
            let spec = null_spec(test, n, derive_seed(seed, test as u64, rep));
            let series = simulate_series(&spec)?;
            Ok(raw_statistic(test, &series.values, det)?.0)
        })
        .collect()
}

/// Empirical `alpha`-level critical value of `test` under its null at length `n`.
/// Left-tail tests take the `alpha` quantile, KPSS the `1 - alpha` quantile.
pub fn calibrate_critical_values(test: TestId, det: DetSpec, n: usize, n_reps: usize, alpha: f64, seed: u64) -> Result<f64> {
    if n_reps < 1000 {
        return Err(Error::InvalidConfig(format!("n_reps must be at least 1000, got {n_reps}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let mut stats = simulate_null_statistics(test, det, n, n_reps, seed)?;
    stats.sort_by(f64::total_cmp);
    let p = if test.left_tail() { alpha } else { 1.0 - alpha };
    Ok(quantile(&stats, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
        simulate_series(&DgpSpec::plain(phi, n, seed)).unwrap().values
    }

    #[test]
    fn clamp_rules() {
        assert_eq!(TestId::Kpss.clamp_det_spec(DetSpec::None), DetSpec::Constant);
        assert_eq!(TestId::Urza.clamp_det_spec(DetSpec::None), DetSpec::ConstantAndTrend);
        assert_eq!(TestId::Ursp.clamp_det_spec(DetSpec::Constant), DetSpec::ConstantAndTrend);
        assert_eq!(TestId::Adf.clamp_det_spec(DetSpec::None), DetSpec::None);
    }

    #[test]
    fn constant_series_is_degenerate_for_every_test() {
        let y = vec![3.0; 100];
        let all = compute_all(&y, &DetSpecPolicy::Uniform(DetSpec::Constant));
        assert_eq!(all.len(), 9);
        assert!(all.iter().all(|o| o.is_err()));
        assert!(matches!(
            compute_statistic(TestId::Adf, &y, DetSpec::Constant),
            Err(Error::DegenerateSeries(_))
        ));
    }

    #[test]
    fn every_test_produces_a_result() {
        let y = ar1(0.9, 200, 5);
        for policy in [
            DetSpecPolicy::Uniform(DetSpec::Constant),
            DetSpecPolicy::TrueDgp(DgpForm::Plain),
            DetSpecPolicy::TrueDgp(DgpForm::WithDriftAndTrend),
        ] {
            let all = compute_all(&y, &policy);
            assert_eq!(all.len(), 9);
            for (o, t) in all.iter().zip(TestId::ALL) {
                let r = o.as_ref().unwrap();
                assert_eq!(r.test, t);
                assert!(r.statistic.is_finite());
                assert_eq!(r.reject_null_5pct, rejects(t, r.statistic, r.critical_value_5pct));
            }
        }
    }

    #[test]
    fn short_series_is_rejected() {
        let y = ar1(0.5, 20, 1);
        assert!(matches!(
            compute_statistic(TestId::Adf, &y, DetSpec::None),
            Err(Error::InsufficientLength { .. })
        ));
    }

    #[test]
    fn unsupported_det_spec() {
        let y = ar1(0.5, 100, 1);
        assert!(matches!(
            compute_statistic(TestId::Kpss, &y, DetSpec::None),
            Err(Error::UnsupportedDetSpec { .. })
        ));
    }

    #[test]
    fn quantile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert!((quantile(&v, 0.5) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn calibration_median_and_determinism() {
        let a = calibrate_critical_values(TestId::Adf, DetSpec::None, 100, 1000, 0.5, 9).unwrap();
        let b = calibrate_critical_values(TestId::Adf, DetSpec::None, 100, 1000, 0.5, 9).unwrap();
        assert_eq!(a, b);
        let mut stats = simulate_null_statistics(TestId::Adf, DetSpec::None, 100, 1000, 9).unwrap();
        stats.sort_by(f64::total_cmp);
        assert_eq!(a, (stats[499] + stats[500]) / 2.0);
        assert!(calibrate_critical_values(TestId::Adf, DetSpec::None, 100, 999, 0.05, 9).is_err());
    }
}

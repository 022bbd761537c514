//! Labelled AR(1) series from the three drift/trend data generating processes.
//!
//! ```text
//! WithDriftAndTrend:  y_t = lambda + phi * y_{t-1} + delta * t + e_t
//! WithDrift:          y_t = lambda + phi * y_{t-1} + e_t
//! Plain:              y_t = phi * y_{t-1} + e_t
//! ```
//!
//! The recursion starts from zero. A burn-in runs it for extra periods
//! before the kept sample. Sampled specs use no burn-in for the plain form,
//! whose zero start is its stationary mean, and a burn-in for the two forms
//! with deterministic terms, where a zero start sits far from the series'
//! deterministic path.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DgpForm {
    WithDriftAndTrend,
    WithDrift,
    Plain,
}

impl DgpForm {
    pub const ALL: [DgpForm; 3] = [DgpForm::WithDriftAndTrend, DgpForm::WithDrift, DgpForm::Plain];

    /// 1-based equation number used in reports.
    pub fn equation(self) -> u8 {
        match self {
            DgpForm::WithDriftAndTrend => 1,
            DgpForm::WithDrift => 2,
            DgpForm::Plain => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DgpForm::WithDriftAndTrend => "drift_trend",
            DgpForm::WithDrift => "drift",
            DgpForm::Plain => "plain",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "drift_trend" | "1" => Some(DgpForm::WithDriftAndTrend),
            "drift" | "2" => Some(DgpForm::WithDrift),
            "plain" | "3" => Some(DgpForm::Plain),
            _ => None,
        }
    }
}

/// Ground truth class of a simulated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeriesLabel {
    UnitRoot,
    NearUnitRoot,
}

impl SeriesLabel {
    /// +1 for a unit root, -1 for a near unit root.
    pub fn sign(self) -> i8 {
        match self {
            SeriesLabel::UnitRoot => 1,
            SeriesLabel::NearUnitRoot => -1,
        }
    }

    pub fn from_sign(sign: i8) -> Self {
        if sign > 0 {
            SeriesLabel::UnitRoot
        } else {
            SeriesLabel::NearUnitRoot
        }
    }

    pub fn is_unit_root(self) -> bool {
        self == SeriesLabel::UnitRoot
    }

    pub fn name(self) -> &'static str {
        match self {
            SeriesLabel::UnitRoot => "UR",
            SeriesLabel::NearUnitRoot => "NUR",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "UR" | "1" | "+1" => Some(SeriesLabel::UnitRoot),
            "NUR" | "-1" => Some(SeriesLabel::NearUnitRoot),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Innovation {
    Gaussian,
    /// `sigma * U(-1, 1)`.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub dgp_form: DgpForm,
    pub phi: f64,
    pub lambda: f64,
    pub delta: f64,
    pub sigma: f64,
    pub n_periods: usize,
    pub seed: u64,
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default = "default_innovation")]
    pub innovation: Innovation,
}

fn default_innovation() -> Innovation {
    Innovation::Gaussian
}

impl DgpSpec {
    /// Plain Gaussian spec with no deterministic terms.
    pub fn plain(phi: f64, n_periods: usize, seed: u64) -> Self {
        DgpSpec {
            dgp_form: DgpForm::Plain,
            phi,
            lambda: 0.0,
            delta: 0.0,
            sigma: 1.0,
            n_periods,
            seed,
            burn_in: 0,
            innovation: Innovation::Gaussian,
        }
    }

    pub fn label(&self) -> SeriesLabel {
        if self.phi == 1.0 {
            SeriesLabel::UnitRoot
        } else {
            SeriesLabel::NearUnitRoot
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.phi, self.lambda, self.delta, self.sigma]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidSpec("non-finite parameter".into()));
        }
        if self.sigma <= 0.0 {
            return Err(Error::InvalidSpec(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.phi >= 0.0 && self.phi <= 1.0) {
            return Err(Error::InvalidSpec(format!("phi must lie in [0, 1], got {}", self.phi)));
        }
        match self.dgp_form {
            DgpForm::Plain if self.lambda != 0.0 || self.delta != 0.0 => {
                return Err(Error::InvalidSpec("plain form has no drift or trend".into()))
            }
            DgpForm::WithDrift if self.delta != 0.0 => {
                return Err(Error::InvalidSpec("drift form has no trend".into()))
            }
            _ => {}
        }
        if self.n_periods < 2 {
            return Err(Error::InsufficientLength {
                needed: 2,
                got: self.n_periods,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSeries {
    pub id: u64,
    pub values: Vec<f64>,
    pub label: SeriesLabel,
    pub spec: DgpSpec,
}

/// Innovation draws `e_1..e_T` for a spec, burn-in excluded.
pub fn innovations(spec: &DgpSpec) -> Vec<f64> {
    let mut rng = rng_from_seed(spec.seed);
    let total = spec.burn_in + spec.n_periods;
    let mut draws: Vec<f64> = (0..total).map(|_| draw(&mut rng, spec)).collect();
    draws.drain(..spec.burn_in);
    draws
}

fn draw(rng: &mut crate::rng::Rng, spec: &DgpSpec) -> f64 {
    match spec.innovation {
        Innovation::Gaussian => {
            let z: f64 = StandardNormal.sample(rng);
            spec.sigma * z
        }
        Innovation::Uniform => spec.sigma * rng.gen_range(-1.0..1.0),
    }
}

/// Simulate one series. Pure in `spec`: the same spec always yields the same
/// values bit for bit.
pub fn simulate_series(spec: &DgpSpec) -> Result<LabeledSeries> {
    simulate_series_with_id(spec, 0)
}

pub fn simulate_series_with_id(spec: &DgpSpec, id: u64) -> Result<LabeledSeries> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let total = spec.burn_in + spec.n_periods;
    let mut values = Vec::with_capacity(spec.n_periods);
    let mut y = 0.0_f64;
    // Time index of the first kept observation is 1; burn-in periods precede it.
    let first_t = 1_i64 - spec.burn_in as i64;
    for step in 0..total {
        let e = draw(&mut rng, spec);
        let t = first_t + step as i64;
        if step > 0 {
            y = spec.lambda + spec.phi * y + spec.delta * t as f64 + e;
        }
        if step >= spec.burn_in {
            values.push(y);
        }
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("simulated series overflowed".into()));
    }
    Ok(LabeledSeries {
        id,
        values,
        label: spec.label(),
        spec: spec.clone(),
    })
}

/// Parameters for drawing random [`DgpSpec`]s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingConfig {
    /// Probability of drawing a unit-root series.
    pub unit_root_prior: f64,
    pub phi_low: f64,
    pub phi_high: f64,
    pub years_min: u32,
    pub years_max: u32,
    /// Observations per year.
    pub frequency: u32,
    pub lambda_low: f64,
    pub lambda_high: f64,
    pub delta_low: f64,
    pub delta_high: f64,
    pub sigma: f64,
    pub innovation: Innovation,
    /// Burn-in for the plain form.
    pub burn_in: usize,
    /// Burn-in for the drift and drift-plus-trend forms.
    pub burn_in_deterministic: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            unit_root_prior: 0.5,
            phi_low: 0.9,
            phi_high: 0.9999,
            years_min: 5,
            years_max: 50,
            frequency: 12,
            lambda_low: -2.0,
            lambda_high: 2.0,
            delta_low: -0.05,
            delta_high: 0.05,
            sigma: 1.0,
            innovation: Innovation::Gaussian,
            burn_in: 0,
            burn_in_deterministic: 300,
        }
    }
}

impl SamplingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.phi_low < self.phi_high) || self.phi_low <= 0.0 || self.phi_high > 1.0 {
            return Err(Error::InvalidConfig(format!(
                "empty or invalid phi interval ({}, {})",
                self.phi_low, self.phi_high
            )));
        }
        if !(0.0..=1.0).contains(&self.unit_root_prior) {
            return Err(Error::InvalidConfig("unit_root_prior must lie in [0, 1]".into()));
        }
        if self.years_min == 0 || self.years_min > self.years_max || self.frequency == 0 {
            return Err(Error::InvalidConfig("invalid year range or frequency".into()));
        }
        if self.lambda_low > self.lambda_high || self.delta_low > self.delta_high {
            return Err(Error::InvalidConfig("invalid drift or trend range".into()));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::InvalidConfig("sigma must be positive".into()));
        }
        Ok(())
    }
}

fn uniform_in(rng: &mut crate::rng::Rng, low: f64, high: f64) -> f64 {
    if low == high {
        low
    } else {
        rng.gen_range(low..high)
    }
}

/// Draw a random spec. The label is a unit root when `pi_u >= 1 - prior`
/// (the `pi_u >= 0.5` rule at the default prior).
pub fn sample_spec(rng_seed: u64, config: &SamplingConfig) -> Result<DgpSpec> {
    config.validate()?;
    let mut rng = rng_from_seed(rng_seed);
    let pi_u: f64 = rng.gen();
    let unit_root = pi_u >= 1.0 - config.unit_root_prior;
    let phi = if unit_root {
        1.0
    } else {
        // open interval
        loop {
            let p = rng.gen_range(config.phi_low..config.phi_high);
            if p > config.phi_low {
                break p;
            }
        }
    };
    let years = rng.gen_range(config.years_min..=config.years_max);
    let dgp_form = DgpForm::ALL[rng.gen_range(0..3)];
    let lambda = uniform_in(&mut rng, config.lambda_low, config.lambda_high);
    let delta = uniform_in(&mut rng, config.delta_low, config.delta_high);
    let (lambda, delta) = match dgp_form {
        DgpForm::WithDriftAndTrend => (lambda, delta),
        DgpForm::WithDrift => (lambda, 0.0),
        DgpForm::Plain => (0.0, 0.0),
    };
    Ok(DgpSpec {
        dgp_form,
        phi,
        lambda,
        delta,
        sigma: config.sigma,
        n_periods: (years * config.frequency) as usize,
        seed: rng.gen(),
        burn_in: match dgp_form {
            DgpForm::Plain => config.burn_in,
            _ => config.burn_in_deterministic,
        },
        innovation: config.innovation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Partition {
    Train,
    Validation,
    Test,
}

impl Partition {
    pub const ALL: [Partition; 3] = [Partition::Train, Partition::Validation, Partition::Test];

    pub fn name(self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Validation => "validation",
            Partition::Test => "test",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "train" => Some(Partition::Train),
            "validation" => Some(Partition::Validation),
            "test" => Some(Partition::Test),
            _ => None,
        }
    }
}

/// Partition sizes for `n` series: `floor(0.70 n)` train, `floor(0.15 n)`
/// validation, remainder test.
pub fn partition_sizes(n: usize) -> [usize; 3] {
    let train = n * 70 / 100;
    let validation = n * 15 / 100;
    [train, validation, n - train - validation]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train: Vec<LabeledSeries>,
    pub validation: Vec<LabeledSeries>,
    pub test: Vec<LabeledSeries>,
}

impl Dataset {
    pub fn partition(&self, p: Partition) -> &[LabeledSeries] {
        match p {
            Partition::Train => &self.train,
            Partition::Validation => &self.validation,
            Partition::Test => &self.test,
        }
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Seed of the spec draw for series `index`.
pub fn series_seed(base_seed: u64, index: u64) -> u64 {
    derive_seed(base_seed, 0x5EED_0001, index)
}

/// Series `index` of the dataset defined by `(base_seed, config)`.
pub fn dataset_series(index: u64, base_seed: u64, config: &SamplingConfig) -> Result<LabeledSeries> {
    let spec = sample_spec(series_seed(base_seed, index), config)?;
    simulate_series_with_id(&spec, index)
}

/// Generate `n` series split 70/15/15 by index ranges. Series `i` depends only
/// on `(base_seed, i)`, so the result is identical however the work is
/// scheduled.
pub fn generate_dataset(n: usize, base_seed: u64, config: &SamplingConfig) -> Result<Dataset> {
    if n < 10 {
        return Err(Error::InvalidConfig(format!("dataset needs at least 10 series, got {n}")));
    }
    config.validate()?;
    let all: Vec<LabeledSeries> = (0..n as u64)
        .into_par_iter()
        .map(|i| dataset_series(i, base_seed, config))
        .collect::<Result<_>>()?;
    let [train, validation, _] = partition_sizes(n);
    let mut iter = all.into_iter();
    let train: Vec<_> = iter.by_ref().take(train).collect();
    let validation: Vec<_> = iter.by_ref().take(validation).collect();
    let test: Vec<_> = iter.collect();
    Ok(Dataset {
        train,
        validation,
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_root_first_difference_is_the_innovation() {
        let spec = DgpSpec::plain(1.0, 100, 42);
        let s = simulate_series(&spec).unwrap();
        let e = innovations(&spec);
        assert_eq!(s.values[0], 0.0);
        for t in 1..100 {
            assert!((s.values[t] - s.values[t - 1] - e[t]).abs() < 1e-12);
        }
        assert_eq!(s.label, SeriesLabel::UnitRoot);
    }

    #[test]
    fn phi_zero_reproduces_innovations() {
        let spec = DgpSpec::plain(0.0, 100, 3);
        let s = simulate_series(&spec).unwrap();
        let e = innovations(&spec);
        assert_eq!(s.values[1..], e[1..]);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = DgpSpec::plain(f64::NAN, 100, 1);
        assert!(matches!(simulate_series(&spec), Err(Error::InvalidSpec(_))));
        spec.phi = 0.5;
        spec.n_periods = 1;
        assert!(matches!(simulate_series(&spec), Err(Error::InsufficientLength { .. })));
        spec.n_periods = 10;
        spec.lambda = 1.0;
        assert!(matches!(simulate_series(&spec), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn burn_in_changes_the_start() {
        let mut spec = DgpSpec::plain(0.9, 50, 11);
        spec.burn_in = 100;
        let s = simulate_series(&spec).unwrap();
        assert_eq!(s.values.len(), 50);
        assert_ne!(s.values[0], 0.0);
    }

    #[test]
    fn partition_rounding() {
        assert_eq!(partition_sizes(10), [7, 1, 2]);
        assert_eq!(partition_sizes(100_000), [70_000, 15_000, 15_000]);
        assert_eq!(partition_sizes(80_000), [56_000, 12_000, 12_000]);
    }

    #[test]
    fn empty_phi_interval_is_rejected() {
        let cfg = SamplingConfig {
            phi_low: 0.95,
            phi_high: 0.95,
            ..Default::default()
        };
        assert!(matches!(sample_spec(1, &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn sampled_specs_respect_form_constraints() {
        let cfg = SamplingConfig::default();
        for seed in 0..500 {
            let spec = sample_spec(seed, &cfg).unwrap();
            spec.validate().unwrap();
            assert_eq!(spec.n_periods % 12, 0);
        }
    }
}

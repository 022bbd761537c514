//! Experiment configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evalkit::DEFAULT_BINS;
use crate::learners::{ForestParams, GbmParams};
use crate::sim::{DgpForm, SamplingConfig};
use crate::urtests::{DetSpec, DetSpecPolicy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Total series, split 70/15/15 into train, validation and test.
    pub n_series: usize,
    pub out_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    /// `"true_dgp"` runs each test with the deterministic terms of the
    /// series' own generating process; `"none"`, `"constant"` or `"trend"`
    /// use one specification for all series.
    pub feature_policy: String,
    pub cost_ratios: Vec<f64>,
    /// Sizes mapped to cost ratios on the validation partition.
    pub alphas: Vec<f64>,
    pub mi_bins: usize,
    pub sampling: SamplingConfig,
    pub forest: ForestGrid,
    pub gbm: GbmGrid,
    pub cv: CvConfig,
    pub power: PowerConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 20_240_611,
            n_series: 80_000,
            out_dir: PathBuf::from("runs/desk"),
            jobs: 0,
            feature_policy: "true_dgp".into(),
            cost_ratios: vec![4.0, 2.0, 1.0, 0.5, 0.25],
            alphas: vec![0.05, 0.01],
            mi_bins: DEFAULT_BINS,
            sampling: SamplingConfig::default(),
            forest: ForestGrid::default(),
            gbm: GbmGrid::default(),
            cv: CvConfig::default(),
            power: PowerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestGrid {
    pub n_trees: usize,
    /// Trees per forest inside cross-validation.
    pub cv_trees: usize,
    pub k_features: Vec<usize>,
    pub min_node_size: Vec<usize>,
}

impl Default for ForestGrid {
    fn default() -> Self {
        ForestGrid {
            n_trees: 500,
            cv_trees: 100,
            k_features: vec![3, 9, 27],
            min_node_size: vec![2, 4, 16],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbmGrid {
    /// Upper bound on boosting rounds; cross-validation picks the count.
    pub n_trees: usize,
    pub patience: usize,
    pub learning_rate: Vec<f64>,
    pub colsample: Vec<f64>,
    pub subsample: Vec<f64>,
    pub max_depth: Vec<usize>,
}

impl Default for GbmGrid {
    fn default() -> Self {
        GbmGrid {
            n_trees: 500,
            patience: 25,
            learning_rate: vec![0.01, 0.03, 0.1, 0.3, 0.5],
            colsample: vec![0.8, 1.0],
            subsample: vec![0.8, 1.0],
            max_depth: vec![4, 6],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvConfig {
    /// When false the first value of every grid axis is used as is.
    pub enabled: bool,
    pub folds: usize,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig { enabled: true, folds: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerConfig {
    pub enabled: bool,
    pub n_periods: Vec<usize>,
    pub n_reps: usize,
    pub alpha: f64,
    /// Cost ratio whose threshold the trained models use.
    pub cost_ratio: f64,
    pub phi_grid: Vec<f64>,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            enabled: true,
            n_periods: vec![250],
            n_reps: 1000,
            alpha: 0.05,
            cost_ratio: 1.0,
            phi_grid: crate::evalkit::default_phi_grid(),
        }
    }
}

/// Parse a feature-policy name.
pub fn parse_policy(name: &str) -> Result<Option<DetSpec>> {
    if name == "true_dgp" {
        return Ok(None);
    }
    DetSpec::parse(name)
        .map(Some)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown feature_policy {name:?}")))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(format!("config: {}", e.message())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::InvalidConfig(m) => Error::InvalidConfig(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Hex SHA-256 of the canonical TOML form. The output directory and
    /// thread count do not change results and are left out.
    pub fn hash(&self) -> String {
        let canonical = ExperimentConfig {
            out_dir: PathBuf::new(),
            jobs: 0,
            ..self.clone()
        };
        hex::encode(Sha256::digest(canonical.to_toml().as_bytes()))
    }

    /// Deterministic-term policy for a series generated under `form`.
    pub fn policy_for(&self, form: DgpForm) -> DetSpecPolicy {
        match parse_policy(&self.feature_policy) {
            Ok(Some(det)) => DetSpecPolicy::Uniform(det),
            _ => DetSpecPolicy::TrueDgp(form),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.n_series < 10 {
            return bad("n_series must be at least 10");
        }
        parse_policy(&self.feature_policy)?;
        if self.cost_ratios.is_empty() || self.cost_ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return bad("cost_ratios must be non-empty and positive");
        }
        if self.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return bad("alphas must lie in (0, 1)");
        }
        if self.mi_bins < 2 {
            return bad("mi_bins must be at least 2");
        }
        self.sampling.validate()?;
        let f = &self.forest;
        if f.n_trees == 0 || f.cv_trees == 0 || f.k_features.is_empty() || f.min_node_size.is_empty() {
            return bad("forest grid axes must be non-empty and tree counts positive");
        }
        if f.k_features.iter().any(|&k| k == 0 || k > crate::tsfeatures::N_FEATURES)
            || f.min_node_size.contains(&0)
        {
            return bad("forest k_features must lie in 1..=36 and min_node_size must be positive");
        }
        let g = &self.gbm;
        if g.n_trees == 0
            || g.learning_rate.is_empty()
            || g.colsample.is_empty()
            || g.subsample.is_empty()
            || g.max_depth.is_empty()
        {
            return bad("gbm grid axes must be non-empty and n_trees positive");
        }
        let unit = |v: &[f64]| v.iter().all(|x| *x > 0.0 && *x <= 1.0);
        if !unit(&g.learning_rate) || !unit(&g.colsample) || !unit(&g.subsample) || g.max_depth.contains(&0) {
            return bad("gbm learning_rate, colsample and subsample must lie in (0, 1], max_depth positive");
        }
        if self.cv.enabled && self.cv.folds < 2 {
            return bad("cv.folds must be at least 2");
        }
        let p = &self.power;
        if p.enabled {
            if p.n_reps < 500 || p.n_periods.is_empty() || p.n_periods.iter().any(|&n| n < crate::urtests::MIN_LENGTH) {
                return bad("power needs n_reps >= 500 and lengths of at least 24");
            }
            if !(p.alpha > 0.0 && p.alpha < 1.0) || !(p.cost_ratio > 0.0) {
                return bad("power alpha must lie in (0, 1) and cost_ratio be positive");
            }
            if p.phi_grid.is_empty() || p.phi_grid.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
                return bad("power phi_grid must lie in (0, 1]");
            }
        }
        Ok(())
    }

    /// Every forest candidate, in grid order.
    pub fn forest_candidates(&self) -> Vec<ForestParams> {
        let mut out = Vec::new();
        for &k in &self.forest.k_features {
            for &m in &self.forest.min_node_size {
                out.push(ForestParams {
                    n_trees: self.forest.n_trees,
                    k_features: k,
                    min_node_size: m,
                    seed: self.seed,
                    bootstrap: true,
                });
            }
        }
        out
    }

    /// Every boosting candidate, in grid order.
    pub fn gbm_candidates(&self) -> Vec<GbmParams> {
        let g = &self.gbm;
        let mut out = Vec::new();
        for &learning_rate in &g.learning_rate {
            for &colsample in &g.colsample {
                for &subsample in &g.subsample {
                    for &max_depth in &g.max_depth {
                        out.push(GbmParams {
                            n_trees: g.n_trees,
                            learning_rate,
                            max_depth,
                            subsample,
                            colsample,
                            seed: self.seed,
                            patience: g.patience,
                            ..GbmParams::default()
                        });
                    }
                }
            }
        }
        out
    }
}

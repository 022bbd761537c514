//! Classifier evaluation: confusion-matrix measures, ROC curves, cost-ratio
//! thresholds, power curves, mutual information and impurity importance.

pub mod cost;
pub mod importance;
pub mod info;
pub mod metrics;
pub mod power;
pub mod report;
pub mod roc;

pub use cost::{alpha_to_cost_ratio, calibrate, threshold_for_cost_ratio, AlphaMapping, Calibration, CostRatio};
pub use importance::{mdi_importance, minmax_scale, model_importance, ranked, Importance};
pub use info::{equal_frequency_bins, iqr_matrix, mutual_information, MutualInfoResult, DEFAULT_BINS};
pub use metrics::{confusion, metrics, ConfusionMatrix, MetricsReport, METRIC_NAMES};
pub use power::{default_phi_grid, empirical_cutoff, power_curve, PowerCurve, PowerPoint, PowerTarget};
pub use roc::{roc, RocCurve, RocPoint};

/// +1 (unit root) when `score >= threshold`, else -1.
pub fn decide(score: f64, threshold: f64) -> i8 {
    if score >= threshold {
        1
    } else {
        -1
    }
}

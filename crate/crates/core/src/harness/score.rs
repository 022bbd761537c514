//! Scoring observed series with a trained model.

use serde::{Deserialize, Serialize};

use super::data::log_transform;
use crate::error::{Error, Result};
use crate::evalkit::{calibrate, decide, CostRatio};
use crate::learners::ModelDocument;
use crate::sim::{DgpForm, SeriesLabel};
use crate::tsfeatures::{extract_features, FEATURE_NAMES};
use crate::urtests::{compute_all, DetSpecPolicy, TestOutcome, MIN_LENGTH};

/// Observed series have unknown deterministic terms, so the widest
/// specification is the default.
pub const DEFAULT_SCORING_POLICY: DetSpecPolicy = DetSpecPolicy::TrueDgp(DgpForm::WithDriftAndTrend);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub cost_ratio: f64,
    pub threshold: f64,
    pub label: SeriesLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub id: String,
    pub n: usize,
    pub log_transformed: bool,
    /// Probability of a unit root.
    pub probability: f64,
    pub decisions: Vec<Decision>,
    /// The nine classical tests in feature order.
    pub tests: Vec<TestOutcome>,
    pub n_invalid_features: usize,
}

/// Threshold for `ratio`: the stored one if present, otherwise calibrated
/// on the validation scores kept in the model file.
pub fn model_threshold(doc: &ModelDocument, ratio: f64) -> Result<f64> {
    let ratio = CostRatio::new(ratio)?;
    if let Some(t) = doc.threshold_for(ratio.value()) {
        return Ok(t);
    }
    let set = doc.calibration_set.as_ref().ok_or_else(|| {
        Error::InvalidConfig(format!(
            "model has no threshold for cost ratio {} and no calibration data; run `calibrate` first",
            ratio.value()
        ))
    })?;
    Ok(calibrate(&set.scores, &set.labels, ratio)?.threshold)
}

pub fn score_series(
    doc: &ModelDocument,
    id: &str,
    values: &[f64],
    log: bool,
    ratios: &[f64],
    policy: &DetSpecPolicy,
) -> Result<ScoreReport> {
    if doc.feature_names.iter().map(String::as_str).ne(FEATURE_NAMES.iter().copied()) {
        return Err(Error::Schema(format!(
            "{id}: model features differ from this build's feature extractor"
        )));
    }
    if values.len() < MIN_LENGTH {
        return Err(Error::InsufficientLength {
            needed: MIN_LENGTH,
            got: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateSeries(format!("{id}: non-finite value")));
    }
    let y = if log { log_transform(id, values)? } else { values.to_vec() };
    let tests = compute_all(&y, policy);
    let features = extract_features(&y, &tests)?;
    let probability = doc.predict(&features.values)?.probability_positive;
    let decisions = ratios
        .iter()
        .map(|&r| {
            let threshold = model_threshold(doc, r)?;
            Ok(Decision {
                cost_ratio: r,
                threshold,
                label: SeriesLabel::from_sign(decide(probability, threshold)),
            })
        })
        .collect::<Result<_>>()?;
    Ok(ScoreReport {
        id: id.to_string(),
        n: y.len(),
        log_transformed: log,
        probability,
        decisions,
        tests,
        n_invalid_features: features.n_invalid(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{CalibrationSet, EnsembleModel, Polarity, StoredThreshold, Stump};

    fn stump_doc() -> ModelDocument {
        // Unit root when the ADF statistic (column 0) is above -2.
        let stump = Stump {
            feature_index: 0,
            threshold: -2.0,
            polarity: Polarity::PredictPositiveAbove,
            missing_below: false,
        };
        let mut doc = ModelDocument::new(EnsembleModel::Stump(stump), serde_json::Value::Null);
        doc.thresholds.push(StoredThreshold {
            cost_ratio: 1.0,
            threshold: 0.5,
        });
        doc
    }

    #[test]
    fn thresholds_come_from_the_file_or_the_calibration_set() {
        let mut doc = stump_doc();
        assert_eq!(model_threshold(&doc, 1.0).unwrap(), 0.5);
        assert!(matches!(model_threshold(&doc, 2.0), Err(Error::InvalidConfig(_))));
        doc.calibration_set = Some(CalibrationSet {
            scores: vec![0.1, 0.2, 0.8, 0.9],
            labels: vec![-1, -1, 1, 1],
        });
        assert_eq!(model_threshold(&doc, 2.0).unwrap(), 0.5);
    }

    #[test]
    fn scores_a_series_and_reports_all_tests() {
        let doc = stump_doc();
        let y: Vec<f64> = (0..200).map(|t| ((t * 37 % 11) as f64 - 5.0) * 0.3).collect();
        let r = score_series(&doc, "noise", &y, false, &[1.0], &DEFAULT_SCORING_POLICY).unwrap();
        assert_eq!(r.tests.len(), 9);
        assert_eq!(r.decisions.len(), 1);
        assert!(r.probability == 0.0 || r.probability == 1.0);
    }

    #[test]
    fn rejects_short_or_mismatched_input() {
        let mut doc = stump_doc();
        let short = vec![1.0; 10];
        assert!(matches!(
            score_series(&doc, "s", &short, false, &[1.0], &DEFAULT_SCORING_POLICY),
            Err(Error::InsufficientLength { .. })
        ));
        let y: Vec<f64> = (1..100).map(|t| t as f64).collect();
        doc.feature_names.pop();
        assert!(matches!(
            score_series(&doc, "s", &y, false, &[1.0], &DEFAULT_SCORING_POLICY),
            Err(Error::Schema(_))
        ));
        let neg: Vec<f64> = (0..100).map(|t| t as f64 - 50.0).collect();
        assert!(score_series(&stump_doc(), "n", &neg, true, &[1.0], &DEFAULT_SCORING_POLICY).is_err());
    }
}

//! Cross-validated grid search over forest and boosting hyperparameters.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::learners::{fit_forest, fit_gbm_validated, log_loss, to_binary, FeatureMatrix, ForestParams, GbmParams};
use crate::rng::{derive_seed, rng_from_seed};

/// Probabilities are clipped to `[EPS, 1 - EPS]` before taking logs, so a
/// unanimous forest vote costs a finite amount.
const EPS: f64 = 1e-6;

fn prob_log_loss(p: &[f64], y: &[i8]) -> f64 {
    p.iter()
        .zip(y)
        .map(|(&p, &y)| {
            let p = p.clamp(EPS, 1.0 - EPS);
            if y == 1 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum::<f64>()
        / p.len() as f64
}

fn accuracy(p: &[f64], y: &[i8]) -> f64 {
    p.iter().zip(y).filter(|(p, y)| (**p >= 0.5) == (**y == 1)).count() as f64 / p.len() as f64
}

/// Fold index per row; each class is shuffled and dealt round-robin.
pub fn stratified_folds(labels: &[i8], k: usize, seed: u64) -> Result<Vec<usize>> {
    let mut fold = vec![0; labels.len()];
    for (c, class) in [1i8, -1].into_iter().enumerate() {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if rows.len() < k {
            return Err(Error::DegenerateLabels(format!(
                "{} rows of class {class} cannot fill {k} folds",
                rows.len()
            )));
        }
        rows.shuffle(&mut rng_from_seed(derive_seed(seed, 0xF01D, c as u64)));
        for (j, &i) in rows.iter().enumerate() {
            fold[i] = j % k;
        }
    }
    Ok(fold)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Candidate {
    Forest(ForestParams),
    Gbm(GbmParams),
}

impl Candidate {
    pub fn family(&self) -> &'static str {
        match self {
            Candidate::Forest(_) => "rf",
            Candidate::Gbm(_) => "gbm",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Candidate::Forest(p) => format!("k_features={} min_node_size={}", p.k_features, p.min_node_size),
            Candidate::Gbm(p) => format!(
                "learning_rate={} colsample={} subsample={} max_depth={}",
                p.learning_rate, p.colsample, p.subsample, p.max_depth
            ),
        }
    }

    /// Smaller is simpler; breaks ties in the selection metric.
    fn complexity(&self, mean_rounds: f64) -> (f64, f64, f64) {
        match self {
            Candidate::Forest(p) => (-(p.min_node_size as f64), p.k_features as f64, 0.0),
            Candidate::Gbm(p) => (mean_rounds, p.max_depth as f64, -p.learning_rate),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateResult {
    pub candidate: Candidate,
    pub fold_log_loss: Vec<f64>,
    pub fold_accuracy: Vec<f64>,
    pub mean_log_loss: f64,
    pub sd_log_loss: f64,
    pub mean_accuracy: f64,
    /// Early-stopping rounds per fold (boosting only).
    pub best_rounds: Vec<usize>,
    pub winner: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub results: Vec<CandidateResult>,
    /// Model fits performed (candidates times folds).
    pub n_runs: usize,
    pub forest: ForestParams,
    /// Winner with `n_trees` set to the mean early-stopping round.
    pub gbm: GbmParams,
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
    } else {
        0.0
    };
    (m, var.sqrt())
}

fn evaluate(
    cand: &Candidate,
    x: &FeatureMatrix,
    y: &[i8],
    folds: &[usize],
    k: usize,
    cv_trees: usize,
) -> Result<CandidateResult> {
    let mut ll = Vec::with_capacity(k);
    let mut acc = Vec::with_capacity(k);
    let mut rounds = Vec::new();
    for f in 0..k {
        let train: Vec<usize> = (0..y.len()).filter(|&i| folds[i] != f).collect();
        let held: Vec<usize> = (0..y.len()).filter(|&i| folds[i] == f).collect();
        let (xt, xh) = (x.select_rows(&train), x.select_rows(&held));
        let yt: Vec<i8> = train.iter().map(|&i| y[i]).collect();
        let yh: Vec<i8> = held.iter().map(|&i| y[i]).collect();
        let p: Vec<f64> = match cand {
            Candidate::Forest(p) => {
                let params = ForestParams {
                    n_trees: cv_trees,
                    seed: derive_seed(p.seed, 0xC7, f as u64),
                    ..p.clone()
                };
                let m = fit_forest(&xt, &yt, &params)?;
                (0..xh.n_rows()).map(|i| m.score(xh.row(i))).collect()
            }
            Candidate::Gbm(p) => {
                let params = GbmParams {
                    seed: derive_seed(p.seed, 0xC7, f as u64),
                    ..p.clone()
                };
                let yh01 = to_binary(&yh);
                let m = fit_gbm_validated(&xt, &to_binary(&yt), Some((&xh, &yh01)), &params)?;
                rounds.push(m.trees.len());
                let raw: Vec<f64> = (0..xh.n_rows()).map(|i| m.raw_score(xh.row(i))).collect();
                ll.push(log_loss(&raw, &yh01));
                raw.iter().map(|&r| crate::learners::logistic(r)).collect()
            }
        };
        if matches!(cand, Candidate::Forest(_)) {
            ll.push(prob_log_loss(&p, &yh));
        }
        acc.push(accuracy(&p, &yh));
    }
    let (mean_log_loss, sd_log_loss) = mean_sd(&ll);
    Ok(CandidateResult {
        candidate: cand.clone(),
        mean_accuracy: mean_sd(&acc).0,
        fold_log_loss: ll,
        fold_accuracy: acc,
        mean_log_loss,
        sd_log_loss,
        best_rounds: rounds,
        winner: false,
    })
}

fn mean_rounds(r: &CandidateResult) -> f64 {
    if r.best_rounds.is_empty() {
        0.0
    } else {
        r.best_rounds.iter().sum::<usize>() as f64 / r.best_rounds.len() as f64
    }
}

fn pick_winner(results: &mut [CandidateResult], family: &str) -> usize {
    let better = |a: &CandidateResult, b: &CandidateResult| {
        let tol = 1e-12 * a.mean_log_loss.abs().max(1.0);
        if (a.mean_log_loss - b.mean_log_loss).abs() > tol {
            a.mean_log_loss < b.mean_log_loss
        } else {
            a.candidate.complexity(mean_rounds(a)) < b.candidate.complexity(mean_rounds(b))
        }
    };
    let mut best: Option<usize> = None;
    for (i, r) in results.iter().enumerate() {
        if r.candidate.family() == family && best.map_or(true, |b| better(r, &results[b])) {
            best = Some(i);
        }
    }
    let i = best.expect("family has candidates");
    results[i].winner = true;
    i
}

/// Cross-validate every candidate of `config` on `(x, y)` with stratified
/// folds. With cross-validation disabled the first grid value of each axis
/// wins without any fits.
pub fn grid_search(x: &FeatureMatrix, y: &[i8], config: &ExperimentConfig) -> Result<GridSearchResult> {
    let forests = config.forest_candidates();
    let gbms = config.gbm_candidates();
    if !config.cv.enabled {
        return Ok(GridSearchResult {
            results: Vec::new(),
            n_runs: 0,
            forest: forests[0].clone(),
            gbm: gbms[0].clone(),
        });
    }
    let k = config.cv.folds;
    let folds = stratified_folds(y, k, config.seed)?;
    let candidates: Vec<Candidate> = forests
        .into_iter()
        .map(Candidate::Forest)
        .chain(gbms.into_iter().map(Candidate::Gbm))
        .collect();
    let mut results = candidates
        .iter()
        .map(|c| evaluate(c, x, y, &folds, k, config.forest.cv_trees))
        .collect::<Result<Vec<_>>>()?;
    let rf = pick_winner(&mut results, "rf");
    let gb = pick_winner(&mut results, "gbm");
    let Candidate::Forest(forest) = results[rf].candidate.clone() else { unreachable!() };
    let Candidate::Gbm(mut gbm) = results[gb].candidate.clone() else { unreachable!() };
    gbm.n_trees = (mean_rounds(&results[gb]).round() as usize).max(1);
    Ok(GridSearchResult {
        n_runs: results.len() * k,
        results,
        forest,
        gbm,
    })
}

pub fn write_grid_csv(path: &std::path::Path, g: &GridSearchResult) -> Result<()> {
    let rows: Vec<Vec<String>> = g
        .results
        .iter()
        .map(|r| {
            vec![
                r.candidate.family().to_string(),
                r.candidate.describe(),
                format!("{}", r.mean_log_loss),
                format!("{}", r.sd_log_loss),
                format!("{}", r.mean_accuracy),
                format!("{}", mean_rounds(r)),
                r.winner.to_string(),
            ]
        })
        .collect();
    crate::evalkit::report::write_csv(
        path,
        &["family", "params", "cv_log_loss", "cv_log_loss_sd", "cv_accuracy", "mean_rounds", "winner"],
        &rows,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn folds_are_stratified() {
        let y: Vec<i8> = (0..103).map(|i| if i % 3 == 0 { 1 } else { -1 }).collect();
        let f = stratified_folds(&y, 5, 1).unwrap();
        for k in 0..5 {
            let pos = (0..y.len()).filter(|&i| f[i] == k && y[i] == 1).count();
            assert!((6..=7).contains(&pos), "fold {k}: {pos}");
        }
        assert!(stratified_folds(&[1, 1, -1], 2, 0).is_err());
    }

    #[test]
    fn singleton_grid_wins_trivially() {
        let mut rng = rng_from_seed(2);
        let rows: Vec<Vec<f64>> = (0..200).map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let y: Vec<i8> = rows.iter().map(|r| if r[0] + r[1] > 0.0 { 1 } else { -1 }).collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let mut cfg = ExperimentConfig::default();
        cfg.forest.k_features = vec![2];
        cfg.forest.min_node_size = vec![4];
        cfg.forest.cv_trees = 20;
        cfg.gbm.learning_rate = vec![0.1];
        cfg.gbm.colsample = vec![0.8];
        cfg.gbm.subsample = vec![0.8];
        cfg.gbm.max_depth = vec![3];
        cfg.gbm.n_trees = 60;
        let g = grid_search(&x, &y, &cfg).unwrap();
        assert_eq!(g.n_runs, 10);
        assert_eq!(g.results.iter().filter(|r| r.winner).count(), 2);
        assert_eq!(g.forest.k_features, 2);
        assert_eq!(g.gbm.max_depth, 3);
        assert!(g.gbm.n_trees >= 1 && g.gbm.n_trees <= 60);
        assert!(g.results.iter().all(|r| r.mean_accuracy > 0.8));
    }
}

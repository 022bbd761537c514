//! The staged experiment: simulate, features, train, calibrate, evaluate.
//!
//! Every stage reads its inputs from the output directory and records what
//! it wrote in `manifest.json`, so stages can also run one at a time from
//! the command line. The test partition is first touched by `evaluate`;
//! the manifest's access log makes that checkable.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::data::{read_dataset, write_dataset, DatasetRecord};
use super::features::{build_feature_matrix, read_features, test_decisions, write_features, FeatureTable};
use super::grid::{grid_search, write_grid_csv, GridSearchResult};
use super::score::model_threshold;
use crate::error::{Error, Result};
use crate::evalkit::report::{
    write_csv, write_importance, write_matrix, write_metrics_table, write_power_curves, write_roc, write_thresholds,
    MetricsRow,
};
use crate::evalkit::{
    alpha_to_cost_ratio, calibrate, confusion, decide, model_importance, mutual_information, power_curve, roc,
    AlphaMapping, Calibration, CostRatio, Importance, PowerCurve, PowerTarget,
};
use crate::learners::{
    fit_forest, fit_gbm, fit_gbm_validated, to_binary, CalibrationSet, EnsembleModel, ModelDocument, StoredThreshold,
};
use crate::rng::derive_seed;
use crate::sim::{generate_dataset, DgpForm, Partition};
use crate::tsfeatures::FEATURE_NAMES;
use crate::urtests::{DetSpec, TestId};

pub const STAGES: [&str; 5] = ["simulate", "features", "train", "calibrate", "evaluate"];

/// The two trained models, by file stem.
pub const MODELS: [&str; 2] = ["rf", "gbm"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub stage: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub started_unix: u64,
    pub finished_unix: Option<u64>,
    pub completed: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Access {
    pub stage: String,
    pub partition: String,
    /// `"generate"` or `"read"`.
    pub mode: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub software_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub stages: Vec<StageRecord>,
    pub artifacts: Vec<Artifact>,
    pub access_log: Vec<Access>,
}

impl RunManifest {
    fn new(config: &ExperimentConfig) -> Self {
        RunManifest {
            software_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config.hash(),
            seed: config.seed,
            stages: Vec::new(),
            artifacts: Vec::new(),
            access_log: Vec::new(),
        }
    }

    pub fn completed(&self, stage: &str) -> bool {
        self.stages.iter().any(|s| s.name == stage && s.completed)
    }

    /// Path to checksum; timestamps excluded, so two runs of one config
    /// compare equal.
    pub fn checksums(&self) -> BTreeMap<String, String> {
        self.artifacts.iter().map(|a| (a.path.clone(), a.sha256.clone())).collect()
    }

    pub fn artifact(&self, path: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.path == path)
    }

    /// Stages that read `partition`, in order.
    pub fn readers_of(&self, partition: Partition) -> Vec<&str> {
        self.access_log
            .iter()
            .filter(|a| a.mode == "read" && a.partition == partition.name())
            .map(|a| a.stage.as_str())
            .collect()
    }

    /// Every artifact exists under `dir` with its recorded checksum.
    pub fn verify(&self, dir: &Path) -> Result<()> {
        for a in &self.artifacts {
            let got = sha256_file(&dir.join(&a.path))?;
            if got != a.sha256 {
                return Err(Error::Schema(format!("{}: checksum mismatch", a.path)));
            }
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let p = dir.join("manifest.json");
        let text = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Cost-ratio metrics for one model (a row of the threshold table).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub model: String,
    pub cost_ratio: f64,
    pub threshold: f64,
    pub row: MetricsRow,
}

/// Everything the evaluation stage computes on the test partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// The nine classical tests at their 5% critical values.
    pub baseline: Vec<MetricsRow>,
    /// Both models at the cost-ratio-1 threshold.
    pub main: Vec<MetricsRow>,
    pub by_ratio: Vec<RatioRow>,
    /// Tests and models within each generating process.
    pub per_dgp: Vec<(DgpForm, Vec<MetricsRow>)>,
    pub auc: Vec<(String, f64)>,
    /// Information quality ratios between the nine test statistics
    /// (training partition).
    pub mi_tests: Vec<Vec<f64>>,
    pub importance: Vec<(String, Vec<Importance>)>,
    pub power: Vec<PowerCurve>,
}

/// A run directory and its manifest.
pub struct Run {
    pub config: ExperimentConfig,
    pub dir: PathBuf,
    pub manifest: RunManifest,
}

impl Run {
    /// Open `config.out_dir`, resuming any manifest found there.
    pub fn open(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let dir = config.out_dir.clone();
        std::fs::create_dir_all(dir.join("models")).map_err(|e| Error::io(&dir, e))?;
        // Resume an existing run; rerunning a stage invalidates the later
        // ones, so a changed config cannot mix with stale outputs.
        let manifest = match RunManifest::load(&dir) {
            Ok(mut m) => {
                m.config_hash = config.hash();
                m.seed = config.seed;
                m
            }
            Err(_) => RunManifest::new(&config),
        };
        let run = Run { config, dir, manifest };
        // A copy for the record; the manifest carries its hash instead of a
        // checksum, since the copy names the output directory.
        let cfg = run.dir.join("config.toml");
        std::fs::write(&cfg, run.config.to_toml()).map_err(|e| Error::io(&cfg, e))?;
        run.save_manifest()?;
        Ok(run)
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.join(rel)
    }

    fn save_manifest(&self) -> Result<()> {
        let p = self.path("manifest.json");
        let text = serde_json::to_string_pretty(&self.manifest)?;
        std::fs::write(&p, text).map_err(|e| Error::io(&p, e))
    }

    fn record_artifact(&mut self, stage: &str, rel: &str) -> Result<()> {
        let sha256 = sha256_file(&self.path(rel))?;
        self.manifest.artifacts.retain(|a| a.path != rel);
        self.manifest.artifacts.push(Artifact {
            path: rel.to_string(),
            sha256,
            stage: stage.to_string(),
        });
        Ok(())
    }

    fn log(&mut self, stage: &str, partition: Partition, mode: &str) {
        self.manifest.access_log.push(Access {
            stage: stage.into(),
            partition: partition.name().into(),
            mode: mode.into(),
        });
    }

    /// Run `body` as `name`, after checking the preceding stage finished.
    fn stage<T>(&mut self, name: &str, body: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let pos = STAGES.iter().position(|s| *s == name).expect("known stage");
        if pos > 0 && !self.manifest.completed(STAGES[pos - 1]) {
            return Err(Error::InvalidConfig(format!(
                "stage `{name}` needs `{}` to have completed in {}",
                STAGES[pos - 1],
                self.dir.display()
            )));
        }
        let later = &STAGES[pos..];
        self.manifest.stages.retain(|s| !later.contains(&s.name.as_str()));
        self.manifest.access_log.retain(|a| !later.contains(&a.stage.as_str()));
        self.manifest.stages.push(StageRecord {
            name: name.into(),
            started_unix: now(),
            finished_unix: None,
            completed: false,
            error: None,
        });
        let out = body(self);
        let rec = self.manifest.stages.last_mut().expect("pushed above");
        rec.finished_unix = Some(now());
        match &out {
            Ok(_) => rec.completed = true,
            Err(e) => rec.error = Some(e.to_string()),
        }
        self.save_manifest()?;
        out
    }

    fn records(&mut self, stage: &str, partition: Partition) -> Result<Vec<DatasetRecord>> {
        let all = read_dataset(&self.path("dataset.csv"))?;
        self.log(stage, partition, "read");
        Ok(all.into_iter().filter(|r| r.partition == partition.name()).collect())
    }

    fn features(&mut self, stage: &str, partition: Partition) -> Result<FeatureTable> {
        let t = read_features(&self.path(&format!("features_{}.csv", partition.name())))?;
        self.log(stage, partition, "read");
        Ok(t)
    }

    fn load_model(&self, name: &str) -> Result<ModelDocument> {
        ModelDocument::load(&self.path(&format!("models/{name}.json")))
    }

    /// Generate the dataset. Only specs and seeds are stored; the series
    /// are regenerated from them.
    pub fn simulate(&mut self) -> Result<()> {
        self.stage("simulate", |run| {
            let ds = generate_dataset(run.config.n_series, run.config.seed, &run.config.sampling)?;
            let mut records = Vec::with_capacity(ds.len());
            for p in Partition::ALL {
                records.extend(ds.partition(p).iter().map(|s| DatasetRecord::new(p, s)));
                run.log("simulate", p, "generate");
            }
            write_dataset(&run.path("dataset.csv"), &records)?;
            run.record_artifact("simulate", "dataset.csv")
        })
    }

    /// Feature tables for the training and validation partitions.
    pub fn build_features(&mut self) -> Result<()> {
        self.stage("features", |run| {
            for p in [Partition::Train, Partition::Validation] {
                let recs = run.records("features", p)?;
                let table = build_feature_matrix(&recs, &run.config)?;
                let rel = format!("features_{}.csv", p.name());
                write_features(&run.path(&rel), &table)?;
                run.record_artifact("features", &rel)?;
            }
            Ok(())
        })
    }

    /// Grid search, then the final forest and boosting fits on the full
    /// training partition.
    pub fn train(&mut self) -> Result<GridSearchResult> {
        self.stage("train", |run| {
            let train = run.features("train", Partition::Train)?;
            let g = grid_search(&train.matrix, &train.labels, &run.config)?;
            if !g.results.is_empty() {
                write_grid_csv(&run.path("grid_search.csv"), &g)?;
                run.record_artifact("train", "grid_search.csv")?;
            }
            let forest = fit_forest(&train.matrix, &train.labels, &g.forest)?;
            let gbm = if g.results.is_empty() {
                // No cross-validation: stop early on the validation partition.
                let val = run.features("train", Partition::Validation)?;
                fit_gbm_validated(
                    &train.matrix,
                    &to_binary(&train.labels),
                    Some((&val.matrix, &to_binary(&val.labels))),
                    &g.gbm,
                )?
            } else {
                fit_gbm(&train.matrix, &to_binary(&train.labels), &g.gbm)?
            };
            let mut gbm_params = g.gbm.clone();
            gbm_params.n_trees = gbm.trees.len();
            let docs = [
                ("rf", EnsembleModel::Forest(forest), serde_json::to_value(&g.forest)?),
                ("gbm", EnsembleModel::Gbm(gbm), serde_json::to_value(&gbm_params)?),
            ];
            for (name, model, hp) in docs {
                let rel = format!("models/{name}.json");
                ModelDocument::new(model, hp).save(&run.path(&rel))?;
                run.record_artifact("train", &rel)?;
            }
            Ok(g)
        })
    }

    /// Thresholds for every configured cost ratio (plus ratio 1 and the
    /// ratios implied by the configured sizes), from validation scores.
    pub fn calibrate(&mut self) -> Result<Vec<(String, Calibration, Vec<AlphaMapping>)>> {
        self.stage("calibrate", |run| {
            let val = run.features("calibrate", Partition::Validation)?;
            let mut ratios = run.config.cost_ratios.clone();
            for r in [1.0, run.config.power.cost_ratio] {
                if !ratios.iter().any(|x| (x - r).abs() < 1e-12) {
                    ratios.push(r);
                }
            }
            let mut table = Vec::new();
            let mut alpha_rows = Vec::new();
            let mut out = Vec::new();
            for name in MODELS {
                let mut doc = run.load_model(name)?;
                let scores: Vec<f64> =
                    (0..val.len()).map(|i| doc.predict(val.matrix.row(i))).collect::<Result<Vec<_>>>()?
                        .into_iter()
                        .map(|p| p.probability_positive)
                        .collect();
                let mappings = run
                    .config
                    .alphas
                    .iter()
                    .map(|&a| alpha_to_cost_ratio(&scores, &val.labels, a))
                    .collect::<Result<Vec<_>>>()?;
                doc.thresholds.clear();
                let mut unit = None;
                for &r in ratios.iter().chain(mappings.iter().map(|m| &m.ratio)) {
                    let c = calibrate(&scores, &val.labels, CostRatio::new(r)?)?;
                    doc.thresholds.push(StoredThreshold {
                        cost_ratio: r,
                        threshold: c.threshold,
                    });
                    if r == 1.0 {
                        unit = Some(c);
                    }
                    table.push((name.to_string(), c));
                }
                for m in &mappings {
                    alpha_rows.push(vec![
                        name.to_string(),
                        format!("{}", m.alpha),
                        format!("{}", m.ratio),
                        format!("{}", m.threshold),
                        format!("{}", m.achieved_alpha),
                        m.warning.to_string(),
                    ]);
                }
                doc.calibration_set = Some(CalibrationSet {
                    scores,
                    labels: val.labels.clone(),
                });
                let rel = format!("models/{name}.json");
                doc.save(&run.path(&rel))?;
                run.record_artifact("calibrate", &rel)?;
                out.push((name.to_string(), unit.expect("ratio 1 is calibrated"), mappings));
            }
            write_thresholds(&run.path("thresholds.csv"), &table)?;
            run.record_artifact("calibrate", "thresholds.csv")?;
            write_csv(
                &run.path("alpha_mapping.csv"),
                &["model", "alpha", "cost_ratio", "threshold", "achieved_alpha", "warning"],
                &alpha_rows,
            )?;
            run.record_artifact("calibrate", "alpha_mapping.csv")?;
            Ok(out)
        })
    }

    /// Full evaluation on the test partition, plus the information matrix
    /// and power curves.
    pub fn evaluate(&mut self) -> Result<Evaluation> {
        self.stage("evaluate", |run| {
            let recs = run.records("evaluate", Partition::Test)?;
            let test = build_feature_matrix(&recs, &run.config)?;
            write_features(&run.path("features_test.csv"), &test)?;
            run.record_artifact("evaluate", "features_test.csv")?;
            let ev = evaluate_table(run, &test)?;
            run.write_reports(&ev)?;
            Ok(ev)
        })
    }

    fn write_reports(&mut self, ev: &Evaluation) -> Result<()> {
        let mut files: Vec<String> = Vec::new();
        write_metrics_table(&self.path("table3.csv"), &ev.baseline)?;
        files.push("table3.csv".into());
        write_metrics_table(&self.path("table7.csv"), &ev.main)?;
        files.push("table7.csv".into());
        let rows: Vec<Vec<String>> = ev
            .by_ratio
            .iter()
            .map(|r| {
                let mut v = vec![r.model.clone(), format!("{}", r.cost_ratio), format!("{}", r.threshold)];
                v.extend(r.row.metrics.row().iter().map(|x| format!("{x}")));
                let c = &r.row.confusion;
                v.extend([c.tp, c.fp, c.tn, c.fn_].iter().map(|x| x.to_string()));
                v
            })
            .collect();
        write_csv(
            &self.path("table8.csv"),
            &[
                "model", "cost_ratio", "threshold", "ACC", "SEN", "SPE", "PPV", "NPV", "F1", "MCC", "TP", "FP", "TN", "FN",
            ],
            &rows,
        )?;
        files.push("table8.csv".into());
        for (form, rows) in &ev.per_dgp {
            let rel = format!("per_dgp_{}.csv", form.name());
            write_metrics_table(&self.path(&rel), rows)?;
            files.push(rel);
        }
        let names: Vec<String> = TestId::ALL.iter().map(|t| t.name().to_string()).collect();
        write_matrix(&self.path("mi_matrix.csv"), &names, &ev.mi_tests)?;
        files.push("mi_matrix.csv".into());
        write_importance(&self.path("importance.csv"), &ev.importance)?;
        files.push("importance.csv".into());
        if !ev.power.is_empty() {
            write_power_curves(&self.path("power_curves.csv"), &ev.power)?;
            files.push("power_curves.csv".into());
        }
        let summary = summary_text(&self.config, ev);
        std::fs::write(self.path("summary.txt"), summary).map_err(|e| Error::io(&self.path("summary.txt"), e))?;
        files.push("summary.txt".into());
        let evj = serde_json::to_string(ev)?;
        std::fs::write(self.path("evaluation.json"), evj).map_err(|e| Error::io(&self.path("evaluation.json"), e))?;
        files.push("evaluation.json".into());
        for f in files {
            self.record_artifact("evaluate", &f)?;
        }
        Ok(())
    }

    /// Information quality ratios between the nine test statistics on the
    /// training partition.
    pub fn mi_matrix(&mut self, stage: &str) -> Result<Vec<Vec<f64>>> {
        let train = self.features(stage, Partition::Train)?;
        let cols: Vec<Vec<f64>> = TestId::ALL.iter().map(|&t| train.matrix.column(t as usize)).collect();
        let k = cols.len();
        let mut m = vec![vec![f64::NAN; k]; k];
        for i in 0..k {
            for j in i..k {
                let v = mutual_information(&cols[i], &cols[j], self.config.mi_bins).map_or(f64::NAN, |r| r.iqr);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        Ok(m)
    }

    /// Power curves for the nine tests and both models on plain random
    /// walks, tests at empirically calibrated critical values.
    pub fn power_curves(&self) -> Result<Vec<PowerCurve>> {
        let p = &self.config.power;
        let models: Vec<(ModelDocument, f64)> = MODELS
            .iter()
            .map(|n| {
                let d = self.load_model(n)?;
                let t = model_threshold(&d, p.cost_ratio)?;
                Ok((d, t))
            })
            .collect::<Result<_>>()?;
        let mut curves = Vec::new();
        for &n in &p.n_periods {
            let seed = derive_seed(self.config.seed, 0x90E2, n as u64);
            for test in TestId::ALL {
                let target = PowerTarget::Test {
                    test,
                    det: DetSpec::for_dgp(DgpForm::Plain),
                };
                curves.push(power_curve(&target, &p.phi_grid, n, p.n_reps, p.alpha, seed)?);
            }
            for (doc, threshold) in &models {
                let target = PowerTarget::Model {
                    model: &doc.model,
                    threshold: *threshold,
                };
                curves.push(power_curve(&target, &p.phi_grid, n, p.n_reps, p.alpha, seed)?);
            }
        }
        Ok(curves)
    }
}

fn row_for(name: &str, pred: &[i8], truth: &[i8]) -> Result<MetricsRow> {
    Ok(MetricsRow::new(name, confusion(pred, truth)?))
}

fn evaluate_table(run: &mut Run, test: &FeatureTable) -> Result<Evaluation> {
    let cfg = run.config.clone();
    let decisions: Vec<(TestId, Vec<i8>)> = TestId::ALL
        .iter()
        .map(|&t| Ok((t, test_decisions(test, t, &cfg)?)))
        .collect::<Result<_>>()?;
    let baseline = decisions
        .iter()
        .map(|(t, d)| row_for(t.name(), d, &test.labels))
        .collect::<Result<Vec<_>>>()?;

    let mut main = Vec::new();
    let mut by_ratio = Vec::new();
    let mut auc = Vec::new();
    let mut roc_curves = Vec::new();
    let mut importance = Vec::new();
    let mut model_scores = Vec::new();
    let names: Vec<String> = FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    for name in MODELS {
        let doc = run.load_model(name)?;
        let scores: Vec<f64> = (0..test.len())
            .map(|i| doc.predict(test.matrix.row(i)).map(|p| p.probability_positive))
            .collect::<Result<_>>()?;
        let unit = model_threshold(&doc, 1.0)?;
        main.push(row_for(name, &scores.iter().map(|&s| decide(s, unit)).collect::<Vec<_>>(), &test.labels)?);
        for st in &doc.thresholds {
            let pred: Vec<i8> = scores.iter().map(|&s| decide(s, st.threshold)).collect();
            by_ratio.push(RatioRow {
                model: name.to_string(),
                cost_ratio: st.cost_ratio,
                threshold: st.threshold,
                row: row_for(name, &pred, &test.labels)?,
            });
        }
        let curve = roc(&scores, &test.labels)?;
        auc.push((name.to_string(), curve.auc));
        roc_curves.push((name.to_string(), curve));
        if let Some(imp) = model_importance(&doc.model, &names) {
            importance.push((name.to_string(), imp));
        }
        model_scores.push((name, scores, unit));
    }
    // Every statistic grows with persistence, so it ranks like a score.
    for t in TestId::ALL {
        let (s, l): (Vec<f64>, Vec<i8>) = (0..test.len())
            .map(|i| (test.matrix.get(i, t as usize), test.labels[i]))
            .filter(|(s, _)| s.is_finite())
            .unzip();
        if let Ok(curve) = roc(&s, &l) {
            auc.push((t.name().to_string(), curve.auc));
            roc_curves.push((t.name().to_string(), curve));
        }
    }
    write_roc(&run.path("roc.csv"), &roc_curves)?;
    run.record_artifact("evaluate", "roc.csv")?;

    let mut per_dgp = Vec::new();
    for form in DgpForm::ALL {
        let rows: Vec<usize> = (0..test.len()).filter(|&i| test.forms[i] == form).collect();
        if rows.is_empty() {
            continue;
        }
        let truth: Vec<i8> = rows.iter().map(|&i| test.labels[i]).collect();
        let mut table = Vec::new();
        for (t, d) in &decisions {
            table.push(row_for(t.name(), &rows.iter().map(|&i| d[i]).collect::<Vec<_>>(), &truth)?);
        }
        for (name, scores, unit) in &model_scores {
            let pred: Vec<i8> = rows.iter().map(|&i| decide(scores[i], *unit)).collect();
            table.push(row_for(name, &pred, &truth)?);
        }
        per_dgp.push((form, table));
    }

    let mi_tests = run.mi_matrix("evaluate")?;
    let power = if cfg.power.enabled { run.power_curves()? } else { Vec::new() };
    Ok(Evaluation {
        baseline,
        main,
        by_ratio,
        per_dgp,
        auc,
        mi_tests,
        importance,
        power,
    })
}

fn summary_text(cfg: &ExperimentConfig, ev: &Evaluation) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "series: {}  seed: {}", cfg.n_series, cfg.seed);
    let _ = writeln!(s, "\nclassical tests at 5% (test partition)");
    let line = |s: &mut String, r: &MetricsRow| {
        let m = &r.metrics;
        let _ = writeln!(
            s,
            "  {:<10} ACC {:.3}  SEN {:.3}  SPE {:.3}  MCC {:.3}",
            r.name, m.acc, m.sen, m.spe, m.mcc
        );
    };
    for r in &ev.baseline {
        line(&mut s, r);
    }
    let _ = writeln!(s, "\nmodels at cost ratio 1");
    for r in &ev.main {
        line(&mut s, r);
    }
    let best = ev.baseline.iter().map(|r| r.metrics.sen).fold(f64::NEG_INFINITY, f64::max);
    let _ = writeln!(s, "  best classical SEN {best:.3}");
    let _ = writeln!(s, "\nthresholds by cost ratio");
    for r in &ev.by_ratio {
        let _ = writeln!(
            s,
            "  {:<4} ratio {:<8.4} threshold {:.3}  ACC {:.3}",
            r.model, r.cost_ratio, r.threshold, r.row.metrics.acc
        );
    }
    let _ = writeln!(s, "\nAUC");
    for (n, a) in &ev.auc {
        let _ = writeln!(s, "  {n:<10} {a:.4}");
    }
    s
}

/// Every stage in order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunManifest> {
    let mut run = Run::open(config.clone())?;
    run.simulate()?;
    run.build_features()?;
    run.train()?;
    run.calibrate()?;
    run.evaluate()?;
    Ok(run.manifest)
}

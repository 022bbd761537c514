//! Acceptance criteria, one printed line each.
//!
//! The desk-scale experiment (80,000 series unless
//! `UNITROOT_ACCEPTANCE_SERIES` says otherwise) runs once and is cached
//! under the cargo target tmpdir; the cache is reused only when its
//! manifest matches the configuration and every checksum verifies.
//!
//! A criterion that misses its target prints `FAIL` without failing the
//! test, since several targets are matched against published numbers that
//! a different random draw cannot be expected to hit. Set
//! `UNITROOT_ACCEPTANCE_STRICT=1` to turn misses into a test failure.

mod common;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unitroot_ml::evalkit::report::read_metrics_table;
use unitroot_ml::evalkit::{alpha_to_cost_ratio, metrics, power_curve, roc, PowerTarget};
use unitroot_ml::harness::{
    nelson_plosser, read_features, run_experiment, score_series, Evaluation, ExperimentConfig, FeatureTable,
    RunManifest, DEFAULT_SCORING_POLICY, STAGES,
};
use unitroot_ml::learners::{fit_adaboost, fit_stump, FeatureMatrix, ModelDocument};
use unitroot_ml::sim::DgpForm;
use unitroot_ml::tsfeatures::stl_decompose;
use unitroot_ml::urtests::{ols, DetSpec, Design, TestId};

// Tolerances, fixed before looking at results.
const TABLE3_TOL: f64 = 0.02;
const MODEL_MIN_ACC: f64 = 0.90;
const MODEL_MIN_MCC: f64 = 0.80;
const SEN_GAIN: f64 = 0.25;
const PER_DGP_MARGIN: f64 = 0.03;
const STUMP_ALPHA: (f64, f64) = (0.273, 0.03);
const ADABOOST_ROUNDS: usize = 50;
const AUC_GAP: f64 = 0.01;
const POWER_REPS: usize = 5000;
const SHORT_T: usize = 25;
const SHORT_T_MAX_POWER: f64 = 0.25;
const SIZE_T: usize = 100;
const SIZE_TOL: f64 = 0.006;
const UNIT_THRESHOLD: (f64, f64) = (0.48, 0.05);
const ALPHA_RATIO_BAND: (f64, f64) = (2.0, 4.0);
const MAX_IQR: f64 = 0.35;
/// "Among the largest": within the top three of the 36 pairs.
const IQR_TOP_RANK: usize = 3;
const NP_RATIOS: [f64; 3] = [1.0, 0.2, 0.1];
const NP_UNIT_ROOTS: (usize, usize) = (5, 2);

/// Reference results for the classical tests at 5%: ACC, SEN, SPE, PPV, NPV, F1, MCC.
const PUBLISHED_BASELINE: [(&str, [f64; 7]); 9] = [
    ("ADF", [0.763, 0.546, 0.980, 0.964, 0.684, 0.697, 0.583]),
    ("PP", [0.744, 0.512, 0.975, 0.953, 0.667, 0.666, 0.549]),
    ("KPSS", [0.614, 0.250, 0.977, 0.916, 0.567, 0.393, 0.331]),
    ("PGFF", [0.745, 0.499, 0.989, 0.978, 0.665, 0.661, 0.560]),
    ("BREIT", [0.672, 0.361, 0.981, 0.951, 0.607, 0.524, 0.437]),
    ("ERSd", [0.762, 0.545, 0.979, 0.963, 0.683, 0.696, 0.582]),
    ("ERSp", [0.770, 0.564, 0.976, 0.958, 0.692, 0.710, 0.592]),
    ("URZA", [0.635, 0.309, 0.959, 0.883, 0.582, 0.458, 0.354]),
    ("URSP", [0.727, 0.552, 0.903, 0.850, 0.669, 0.669, 0.485]),
];

struct Desk {
    dir: PathBuf,
    eval: Evaluation,
    stage_secs: Vec<(String, u64)>,
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn desk_config() -> ExperimentConfig {
    let mut c = ExperimentConfig::load(&crate_dir().join("configs/desk.toml")).unwrap();
    if let Ok(n) = std::env::var("UNITROOT_ACCEPTANCE_SERIES") {
        c.n_series = n.parse().expect("UNITROOT_ACCEPTANCE_SERIES is a count");
    }
    c.out_dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("acceptance-desk-{}", c.n_series));
    c
}

fn reusable(config: &ExperimentConfig) -> Option<RunManifest> {
    let m = RunManifest::load(&config.out_dir).ok()?;
    let ok = m.config_hash == config.hash()
        && STAGES.iter().all(|s| m.completed(s))
        && m.verify(&config.out_dir).is_ok();
    ok.then_some(m)
}

fn desk() -> Desk {
    let config = desk_config();
    let manifest = match reusable(&config) {
        Some(m) => m,
        None => {
            let _ = std::fs::remove_dir_all(&config.out_dir);
            run_experiment(&config).unwrap()
        }
    };
    let dir = config.out_dir.clone();
    let eval: Evaluation =
        serde_json::from_str(&std::fs::read_to_string(dir.join("evaluation.json")).unwrap()).unwrap();
    let stage_secs = manifest
        .stages
        .iter()
        .map(|s| (s.name.clone(), s.finished_unix.unwrap_or(s.started_unix).saturating_sub(s.started_unix)))
        .collect();
    Desk {
        dir,
        eval,
        stage_secs,
    }
}

struct Report {
    text: String,
    misses: Vec<usize>,
}

impl Report {
    fn line(&mut self, id: usize, pass: bool, detail: &str) {
        let l = format!("[{}] criterion {id}: {detail}\n", if pass { "PASS" } else { "FAIL" });
        // Written past the test harness capture so the lines always show.
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(l.as_bytes());
        let _ = out.flush();
        self.text.push_str(&l);
        if !pass {
            self.misses.push(id);
        }
    }

    fn note(&mut self, msg: &str) {
        let l = format!("      {msg}\n");
        let _ = std::io::stdout().lock().write_all(l.as_bytes());
        self.text.push_str(&l);
    }
}

fn features(dir: &Path, partition: &str) -> FeatureTable {
    read_features(&dir.join(format!("features_{partition}.csv"))).unwrap()
}

fn adf_column(t: &FeatureTable) -> (FeatureMatrix, Vec<i8>) {
    let (x, y): (Vec<f64>, Vec<i8>) = t
        .column("ADF")
        .unwrap()
        .into_iter()
        .zip(&t.labels)
        .filter(|(v, _)| v.is_finite())
        .unzip();
    (FeatureMatrix::from_column(&x), y)
}

fn secs(d: &Desk, names: &[&str]) -> u64 {
    d.stage_secs.iter().filter(|(n, _)| names.contains(&n.as_str())).map(|(_, s)| s).sum()
}

fn baseline_table(d: &Desk, r: &mut Report) {
    let mut worst = (0.0f64, String::new());
    let mut misses = 0;
    for (name, published) in PUBLISHED_BASELINE {
        let row = d.eval.baseline.iter().find(|r| r.name == name).unwrap();
        for (j, (got, want)) in row.metrics.row().iter().zip(published).enumerate() {
            let gap = (got - want).abs();
            if gap > TABLE3_TOL {
                misses += 1;
            }
            if gap > worst.0 {
                worst = (gap, format!("{name} {} {got:.3} vs {want:.3}", ["ACC", "SEN", "SPE", "PPV", "NPV", "F1", "MCC"][j]));
            }
        }
    }
    r.line(
        1,
        misses == 0,
        &format!(
            "classical table, {misses} of 63 cells outside +-{TABLE3_TOL}; worst {}; features+evaluate {} s",
            worst.1,
            secs(d, &["features", "evaluate"])
        ),
    );
    for row in &d.eval.baseline {
        let m = &row.metrics;
        r.note(&format!(
            "{:<5} ACC {:.3} SEN {:.3} SPE {:.3} PPV {:.3} NPV {:.3} F1 {:.3} MCC {:.3}",
            row.name, m.acc, m.sen, m.spe, m.ppv, m.npv, m.f_beta, m.mcc
        ));
    }
}

fn headline(d: &Desk, r: &mut Report) {
    let best_sen = d.eval.baseline.iter().map(|r| r.metrics.sen).fold(0.0, f64::max);
    let mut pass = true;
    let mut parts = Vec::new();
    for row in &d.eval.main {
        let m = &row.metrics;
        pass &= m.acc >= MODEL_MIN_ACC && m.mcc >= MODEL_MIN_MCC && m.sen >= best_sen + SEN_GAIN;
        parts.push(format!("{} ACC {:.3} MCC {:.3} SEN {:.3}", row.name, m.acc, m.mcc, m.sen));
    }
    r.line(
        2,
        pass,
        &format!(
            "models {}; best classical SEN {best_sen:.3}; train {} s",
            parts.join(", "),
            secs(d, &["train"])
        ),
    );
}

fn per_dgp(d: &Desk, r: &mut Report) {
    let mut pass = true;
    let mut parts = Vec::new();
    for (form, table) in &d.eval.per_dgp {
        let best_test = table
            .iter()
            .filter(|row| TestId::parse(&row.name).is_some())
            .max_by(|a, b| a.metrics.acc.total_cmp(&b.metrics.acc))
            .unwrap();
        for row in table.iter().filter(|row| TestId::parse(&row.name).is_none()) {
            let margin = row.metrics.acc - best_test.metrics.acc;
            pass &= margin >= PER_DGP_MARGIN;
            parts.push(format!("{} {} {:+.3} over {}", form.name(), row.name, margin, best_test.name));
        }
    }
    r.line(3, pass, &format!("per-process margins: {}", parts.join(", ")));
}

fn stump(d: &Desk, r: &mut Report) {
    let t0 = Instant::now();
    let (x, y) = adf_column(&features(&d.dir, "train").subset(DgpForm::Plain));
    let s = fit_stump(&x, &y, &vec![1.0 / y.len() as f64; y.len()]).unwrap();
    let (xt, yt) = adf_column(&features(&d.dir, "test").subset(DgpForm::Plain));
    let nulls: Vec<usize> = (0..yt.len()).filter(|&i| yt[i] == 1).collect();
    let rejected = nulls.iter().filter(|&&i| s.predict(xt.row(i)) == -1).count();
    let alpha = rejected as f64 / nulls.len() as f64;
    r.line(
        4,
        (alpha - STUMP_ALPHA.0).abs() <= STUMP_ALPHA.1,
        &format!(
            "stump on ADF splits at {:.3}, implied size {alpha:.3} on {} held-out unit roots ({:.1} s)",
            s.threshold,
            nulls.len(),
            t0.elapsed().as_secs_f64()
        ),
    );
}

fn boosting(d: &Desk, r: &mut Report) {
    let t0 = Instant::now();
    let (x, y) = adf_column(&features(&d.dir, "train").subset(DgpForm::Plain));
    let m = fit_adaboost(&x, &y, ADABOOST_ROUNDS).unwrap();
    let (xt, yt) = adf_column(&features(&d.dir, "test").subset(DgpForm::Plain));
    let boosted: Vec<f64> = (0..yt.len()).map(|i| m.score_at(xt.row(i), ADABOOST_ROUNDS)).collect();
    let raw = xt.column(0);
    let a = roc(&boosted, &yt).unwrap().auc;
    let b = roc(&raw, &yt).unwrap().auc;
    r.line(
        5,
        (a - b).abs() < AUC_GAP,
        &format!(
            "AdaBoost AUC after {ADABOOST_ROUNDS} rounds {a:.4} vs ADF ranking {b:.4} ({:.1} s)",
            t0.elapsed().as_secs_f64()
        ),
    );
}

fn power(r: &mut Report) {
    let t0 = Instant::now();
    let grid: Vec<f64> = unitroot_ml::evalkit::default_phi_grid().into_iter().filter(|&p| p < 1.0).collect();
    let adf = PowerTarget::Test {
        test: TestId::Adf,
        det: DetSpec::None,
    };
    let short = power_curve(&adf, &grid, SHORT_T, POWER_REPS, 0.05, 11).unwrap();
    let peak = short.points.iter().map(|p| p.rejection_rate).fold(0.0, f64::max);
    let mut sizes = Vec::new();
    for t in TestId::ALL {
        let target = PowerTarget::Test { test: t, det: DetSpec::None };
        let c = power_curve(&target, &[1.0], SIZE_T, POWER_REPS, 0.05, 12).unwrap();
        sizes.push((t.name(), c.points[0].rejection_rate));
    }
    let off = sizes.iter().filter(|(_, s)| (s - 0.05).abs() > SIZE_TOL).count();
    r.line(
        6,
        peak <= SHORT_T_MAX_POWER && off == 0,
        &format!(
            "ADF power at T={SHORT_T} peaks at {peak:.3} below phi=1; {off} of 9 sizes at T={SIZE_T} outside 0.05+-{SIZE_TOL} ({:.0} s)",
            t0.elapsed().as_secs_f64()
        ),
    );
    r.note(
        &sizes
            .iter()
            .map(|(n, s)| format!("{n} {s:.4}"))
            .collect::<Vec<_>>()
            .join("  "),
    );
}

fn cost_ratios(d: &Desk, r: &mut Report) {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["rf", "gbm"] {
        let doc = ModelDocument::load(&d.dir.join(format!("models/{name}.json"))).unwrap();
        let t: Vec<f64> = [4.0, 2.0, 1.0, 0.5, 0.25].iter().map(|&c| doc.threshold_for(c).unwrap()).collect();
        let decreasing = t.windows(2).all(|w| w[0] > w[1]);
        let cal = doc.calibration_set.as_ref().unwrap();
        let map = alpha_to_cost_ratio(&cal.scores, &cal.labels, 0.05).unwrap();
        pass &= decreasing
            && (t[2] - UNIT_THRESHOLD.0).abs() <= UNIT_THRESHOLD.1
            && (ALPHA_RATIO_BAND.0..=ALPHA_RATIO_BAND.1).contains(&map.ratio);
        parts.push(format!(
            "{name} thresholds {} (decreasing {decreasing}), size 0.05 -> ratio {:.3}",
            t.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join("/"),
            map.ratio
        ));
    }
    r.line(7, pass, &parts.join("; "));
}

fn information(d: &Desk, r: &mut Report) {
    let m = &d.eval.mi_tests;
    let names: Vec<&str> = TestId::ALL.iter().map(|t| t.name()).collect();
    let mut pairs = Vec::new();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            pairs.push((m[i][j], names[i], names[j]));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let max = pairs[0].0;
    let rank = 1 + pairs
        .iter()
        .position(|(_, a, b)| (*a, *b) == ("ADF", "ERSd") || (*a, *b) == ("ERSd", "ADF"))
        .unwrap();
    r.line(
        8,
        max < MAX_IQR && rank <= IQR_TOP_RANK,
        &format!(
            "largest IQR {max:.3} ({}-{}); ADF-ERSd {:.3} ranks {rank} of {}",
            pairs[0].1,
            pairs[0].2,
            pairs[rank - 1].0,
            pairs.len()
        ),
    );
}

fn determinism() -> Result<(), String> {
    let base = ExperimentConfig::load(&crate_dir().join("configs/smoke.toml")).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let mut sums = Vec::new();
    for k in 0..2 {
        let c = ExperimentConfig {
            out_dir: tmp.path().join(format!("run{k}")),
            ..base.clone()
        };
        let m = run_experiment(&c).map_err(|e| e.to_string())?;
        sums.push((m.config_hash.clone(), m.checksums()));
    }
    if sums[0] != sums[1] {
        let diff: Vec<&String> = sums[0].1.keys().filter(|k| sums[0].1.get(*k) != sums[1].1.get(*k)).collect();
        return Err(format!("manifests differ in {diff:?}"));
    }
    Ok(())
}

fn properties(d: &Desk, r: &mut Report) {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut log = String::new();

    let mut ols_gap = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(20..80);
        let k = rng.gen_range(1..5);
        let mut cols = vec![vec![1.0; n]];
        cols.extend((0..k).map(|_| (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect::<Vec<f64>>()));
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let fit = ols(&Design::from_columns(cols.clone()).unwrap(), &y).unwrap();
        for (u, v) in fit.coefficients.iter().zip(common::normal_equations(&cols, &y)) {
            ols_gap = ols_gap.max((u - v).abs() / (1.0 + v.abs()));
        }
    }
    let newton = (0..5).map(common::newton_leaf_gap).fold(0.0, f64::max);
    let mut stl_gap = 0.0f64;
    for _ in 0..50 {
        let y: Vec<f64> = (0..rng.gen_range(48..200)).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let s = stl_decompose(&y, 12).unwrap();
        for i in 0..y.len() {
            stl_gap = stl_gap.max((s.trend[i] + s.seasonal[i] + s.remainder[i] - y[i]).abs());
        }
    }
    let mut metric_gap = 0.0f64;
    for table in ["table3.csv", "table7.csv", "per_dgp_plain.csv", "per_dgp_drift.csv", "per_dgp_drift_trend.csv"] {
        for row in read_metrics_table(&d.dir.join(table)).unwrap() {
            for (a, b) in metrics(&row.confusion, 1.0).row().iter().zip(row.metrics.row()) {
                if a.is_finite() || b.is_finite() {
                    metric_gap = metric_gap.max((a - b).abs());
                }
            }
        }
    }
    let test = features(&d.dir, "test");
    let mut round_trip = true;
    for name in ["rf", "gbm"] {
        let doc = ModelDocument::load(&d.dir.join(format!("models/{name}.json"))).unwrap();
        let back = ModelDocument::from_json(&doc.to_json().unwrap()).unwrap();
        round_trip &= (0..test.len().min(2000)).all(|i| {
            let row = test.matrix.row(i);
            doc.predict(row).unwrap().probability_positive.to_bits()
                == back.predict(row).unwrap().probability_positive.to_bits()
        });
    }
    let det = determinism();

    let _ = write!(
        log,
        "OLS {ols_gap:.1e}, Newton {newton:.1e}, STL {stl_gap:.1e}, stored metrics {metric_gap:.1e}, JSON round trip {round_trip}, pipeline determinism {}",
        det.as_ref().map_or_else(|e| e.clone(), |_| "identical".into())
    );
    let pass = ols_gap < 1e-8 && newton < 1e-4 && stl_gap < 1e-8 && metric_gap < 1e-9 && round_trip && det.is_ok();
    r.line(9, pass, &format!("{log} ({:.0} s)", t0.elapsed().as_secs_f64()));
}

fn nelson_plosser_decisions(d: &Desk, r: &mut Report) {
    let doc = ModelDocument::load(&d.dir.join("models/rf.json")).unwrap();
    let data = nelson_plosser();
    let mut unit_at_one = 0;
    let mut parts = Vec::new();
    let mut required = true;
    for s in &data {
        let rep = score_series(&doc, &s.id, &s.values, true, &NP_RATIOS, &DEFAULT_SCORING_POLICY).unwrap();
        let labels: Vec<bool> = rep.decisions.iter().map(|d| d.label.is_unit_root()).collect();
        unit_at_one += usize::from(labels[0]);
        if s.id == "Bond Yields" {
            required &= labels.iter().all(|&u| u);
        }
        parts.push(format!(
            "{} p={:.3} {}",
            s.id,
            rep.probability,
            labels.iter().map(|&u| if u { "UR" } else { "NUR" }).collect::<Vec<_>>().join("/")
        ));
    }
    let velocity = data.iter().any(|s| s.id == "Velocity");
    if !velocity {
        required = false;
        parts.push("Velocity not in the bundled data".into());
    }
    let count_ok = unit_at_one.abs_diff(NP_UNIT_ROOTS.0) <= NP_UNIT_ROOTS.1;
    r.line(
        10,
        required && count_ok,
        &format!("{}; {unit_at_one} of {} unit roots at ratio 1", parts.join(", "), data.len()),
    );
}

#[test]
fn acceptance_criteria() {
    let t0 = Instant::now();
    let d = desk();
    let mut r = Report {
        text: String::new(),
        misses: Vec::new(),
    };
    r.note(&format!(
        "desk run of {} series in {}; stage seconds {:?}",
        desk_config().n_series,
        d.dir.display(),
        d.stage_secs
    ));
    baseline_table(&d, &mut r);
    headline(&d, &mut r);
    per_dgp(&d, &mut r);
    stump(&d, &mut r);
    boosting(&d, &mut r);
    power(&mut r);
    cost_ratios(&d, &mut r);
    information(&d, &mut r);
    properties(&d, &mut r);
    nelson_plosser_decisions(&d, &mut r);
    r.note(&format!("acceptance suite finished in {:.0} s", t0.elapsed().as_secs_f64()));
    std::fs::write(d.dir.join("acceptance.txt"), &r.text).unwrap();
    if std::env::var("UNITROOT_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        assert!(r.misses.is_empty(), "criteria missed: {:?}", r.misses);
    }
}

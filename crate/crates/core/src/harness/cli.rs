//! Command-line interface of the `unitroot` binary.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::ExperimentConfig;
use super::data::{ingest_csv, nelson_plosser, IngestedSeries};
use super::pipeline::{run_experiment, Run, MODELS};
use super::score::{score_series, DEFAULT_SCORING_POLICY};
use crate::error::{Error, Result};
use crate::evalkit::report::{write_importance, write_matrix, write_power_curves};
use crate::evalkit::{alpha_to_cost_ratio, model_importance};
use crate::learners::ModelDocument;
use crate::tsfeatures::FEATURE_NAMES;
use crate::urtests::TestId;

#[derive(Debug, Parser)]
#[command(name = "unitroot", version, about = "Machine-learned composite unit-root tests")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Experiment configuration (TOML); defaults apply to missing keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Cost ratio c(e2)/c(e1) to calibrate; repeatable.
    #[arg(long = "cost-ratio")]
    pub cost_ratio: Vec<f64>,
    /// Size to convert into a cost ratio on validation data; repeatable.
    #[arg(long)]
    pub alpha: Vec<f64>,
}

impl Common {
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(j) = self.jobs {
            c.jobs = j;
        }
        if let Some(d) = &self.out_dir {
            c.out_dir = d.clone();
        }
        if !self.cost_ratio.is_empty() {
            c.cost_ratios = self.cost_ratio.clone();
        }
        if !self.alpha.is_empty() {
            c.alphas = self.alpha.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the train/validation/test dataset.
    Simulate(Common),
    /// Feature tables for the training and validation partitions.
    Features(Common),
    /// Grid search and final model fits.
    Train(Common),
    /// Thresholds for the configured cost ratios.
    Calibrate(Common),
    /// Evaluate on the test partition and write every report.
    Evaluate(Common),
    /// Power curves for the tests and both models.
    PowerCurve(Common),
    /// Information quality ratios between the test statistics.
    MiMatrix(Common),
    /// Impurity importance of both models.
    Importance(Common),
    /// All stages in order.
    Run(Common),
    /// Score series from a `series,year,value` file or the bundled data.
    Score(ScoreArgs),
    /// Validate a `series,year,value` file and print summary statistics.
    Ingest {
        path: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Model file written by `train`/`calibrate`.
    #[arg(long)]
    pub model: PathBuf,
    /// Input file; omit to score the bundled annual macroeconomic series.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Only this series from the input.
    #[arg(long)]
    pub series: Option<String>,
    #[arg(long = "cost-ratio")]
    pub cost_ratio: Vec<f64>,
    #[arg(long)]
    pub alpha: Vec<f64>,
    /// Take natural logs before scoring.
    #[arg(long)]
    pub log_transform: bool,
    /// One JSON report per line, including every test result.
    #[arg(long)]
    pub json: bool,
}

fn init_threads(c: &ExperimentConfig) {
    // Fails only if a pool exists already, which is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(c.jobs).build_global();
}

fn open(common: &Common) -> Result<Run> {
    let c = common.resolve()?;
    init_threads(&c);
    Run::open(c)
}

fn say(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(c) => {
            let mut r = open(&c)?;
            r.simulate()?;
            say(&format!("dataset written to {}", r.dir.join("dataset.csv").display()));
        }
        Command::Features(c) => {
            let mut r = open(&c)?;
            r.build_features()?;
            say(&format!("features written to {}", r.dir.display()));
        }
        Command::Train(c) => {
            let mut r = open(&c)?;
            let g = r.train()?;
            say(&format!(
                "{} cross-validation fits; forest k={} min_node={}; boosting eta={} depth={} rounds={}",
                g.n_runs, g.forest.k_features, g.forest.min_node_size, g.gbm.learning_rate, g.gbm.max_depth, g.gbm.n_trees
            ));
        }
        Command::Calibrate(c) => {
            let mut r = open(&c)?;
            for (name, unit, maps) in r.calibrate()? {
                say(&format!("{name}: threshold {:.4} at cost ratio 1", unit.threshold));
                for m in maps {
                    say(&format!(
                        "{name}: alpha {} -> cost ratio {:.4} (achieved {:.4}{})",
                        m.alpha,
                        m.ratio,
                        m.achieved_alpha,
                        if m.warning { ", out of range" } else { "" }
                    ));
                }
            }
        }
        Command::Evaluate(c) => {
            let mut r = open(&c)?;
            r.evaluate()?;
            let s = std::fs::read_to_string(r.dir.join("summary.txt")).unwrap_or_default();
            say(&s);
        }
        Command::PowerCurve(c) => {
            let r = open(&c)?;
            let curves = r.power_curves()?;
            let p = r.dir.join("power_curves.csv");
            write_power_curves(&p, &curves)?;
            say(&format!("{} curves written to {}", curves.len(), p.display()));
        }
        Command::MiMatrix(c) => {
            let mut r = open(&c)?;
            let m = r.mi_matrix("mi-matrix")?;
            let names: Vec<String> = TestId::ALL.iter().map(|t| t.name().to_string()).collect();
            let p = r.dir.join("mi_matrix.csv");
            write_matrix(&p, &names, &m)?;
            say(&format!("written to {}", p.display()));
        }
        Command::Importance(c) => {
            let r = open(&c)?;
            let names: Vec<String> = FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
            let mut cols = Vec::new();
            for name in MODELS {
                let doc = ModelDocument::load(&r.dir.join(format!("models/{name}.json")))?;
                if let Some(imp) = model_importance(&doc.model, &names) {
                    cols.push((name.to_string(), imp));
                }
            }
            let p = r.dir.join("importance.csv");
            write_importance(&p, &cols)?;
            say(&format!("written to {}", p.display()));
        }
        Command::Run(c) => {
            let cfg = c.resolve()?;
            init_threads(&cfg);
            let m = run_experiment(&cfg)?;
            say(&format!("{} artifacts in {}", m.artifacts.len(), cfg.out_dir.display()));
        }
        Command::Score(a) => score(a)?,
        Command::Ingest { path } => {
            say("series,start,end,T,min,max,sd");
            for s in ingest_csv(&path)? {
                let m = &s.summary;
                say(&format!("{},{},{},{},{},{},{:.4}", s.id, m.start, m.end, m.t, m.min, m.max, m.sd));
            }
        }
    }
    Ok(())
}

fn score(a: ScoreArgs) -> Result<()> {
    let doc = ModelDocument::load(&a.model)?;
    let mut series: Vec<IngestedSeries> = match &a.input {
        Some(p) => ingest_csv(p)?,
        None => nelson_plosser(),
    };
    if let Some(id) = &a.series {
        series.retain(|s| &s.id == id);
        if series.is_empty() {
            return Err(Error::EmptyInput(format!("no series named {id:?}")));
        }
    }
    let mut ratios = if a.cost_ratio.is_empty() { vec![1.0] } else { a.cost_ratio.clone() };
    if !a.alpha.is_empty() {
        let set = doc
            .calibration_set
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("--alpha needs a calibrated model file".into()))?;
        for &al in &a.alpha {
            ratios.push(alpha_to_cost_ratio(&set.scores, &set.labels, al)?.ratio);
        }
    }
    if !a.json {
        let cols: Vec<String> = ratios.iter().map(|r| format!("ratio_{r:.4}")).collect();
        say(&format!("series,T,probability,{}", cols.join(",")));
    }
    for s in &series {
        let r = score_series(&doc, &s.id, &s.values, a.log_transform, &ratios, &DEFAULT_SCORING_POLICY)?;
        if a.json {
            say(&serde_json::to_string(&r)?);
        } else {
            let d: Vec<&str> = r.decisions.iter().map(|d| d.label.name()).collect();
            say(&format!("{},{},{:.4},{}", r.id, r.n, r.probability, d.join(",")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_the_config() {
        let cli = Cli::try_parse_from([
            "unitroot",
            "calibrate",
            "--seed",
            "7",
            "--cost-ratio",
            "3",
            "--cost-ratio",
            "0.5",
            "--out-dir",
            "x",
        ])
        .unwrap();
        let Command::Calibrate(c) = cli.command else { panic!() };
        let cfg = c.resolve().unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.cost_ratios, vec![3.0, 0.5]);
        assert_eq!(cfg.out_dir, PathBuf::from("x"));
    }

    #[test]
    fn bad_flag_values_are_config_errors() {
        let cli = Cli::try_parse_from(["unitroot", "train", "--cost-ratio", "0"]).unwrap();
        let Command::Train(c) = cli.command else { panic!() };
        assert_eq!(c.resolve().unwrap_err().exit_code(), 2);
    }
}

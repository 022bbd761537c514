//! Experiment orchestration: configuration, datasets on disk, feature
//! tables, hyperparameter search, the staged pipeline and the CLI.

pub mod cli;
pub mod config;
pub mod data;
pub mod features;
pub mod grid;
pub mod pipeline;
pub mod score;

pub use config::{CvConfig, ExperimentConfig, ForestGrid, GbmGrid, PowerConfig};
pub use data::{ingest_csv, ingest_str, log_transform, nelson_plosser, read_dataset, write_dataset, DatasetRecord, IngestedSeries, SeriesSummary};
pub use features::{build_feature_matrix, read_features, test_decisions, write_features, FeatureTable};
pub use grid::{grid_search, stratified_folds, Candidate, CandidateResult, GridSearchResult};
pub use pipeline::{run_experiment, Evaluation, RatioRow, Run, RunManifest, MODELS, STAGES};
pub use score::{model_threshold, score_series, Decision, ScoreReport, DEFAULT_SCORING_POLICY};

//! Experiment orchestration: configuration, environments, the training and test
//! loops, metrics, comparisons, parameter sweeps and result export.

mod config;
mod env;
mod export;
mod metrics;
mod seed;
mod sweep;
mod train;

pub use config::{EnvironmentConfig, ExperimentConfig, GridConfig, PlantRef, PlayerOverride};
pub use env::{build_environment, Environment, PlantEnvironment, ReferenceEnvironment, StepReport};
pub use export::{export_results, load_policies, read_summary, METRICS_HEADER};
pub use metrics::{
    compare_runs, convergence_episode, power_delta_pct, ComparisonRow, ComparisonTable, EpisodeMetrics, RunSummary,
};
pub use seed::{player_rng, stream_rng, ENVIRONMENT_STREAM};
pub use sweep::{run_sweep, SweepGrid, SweepReport, SweepResult};
pub use train::{
    run_experiment, run_test, run_training, run_training_traced, RunArtifacts, StepTrace, TrainingOutcome,
};

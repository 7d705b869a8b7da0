//! Experiment orchestration: config files, seeded baseline-vs-PPO runs,
//! metric aggregation and plot-ready CSV/JSON emission.

mod config;
mod curves;
mod run;
mod table3;

pub use config::ExperimentConfig;
pub use curves::{beta_curves, energy_curves};
pub use run::{
    make_policy, metrics_csv, rollout_policy, run_experiment, run_manifest, trace_episode,
    MetricsRow,
};
pub use table3::{reference_energy_table, Table3Check, Table3Row};

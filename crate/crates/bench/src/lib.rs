//! Experiment protocol around `rpd-core`: configuration, runner, paired
//! statistics and text reports.

pub mod config;
pub mod experiment;
pub mod report;
pub mod stats;

pub use config::{ExperimentConfig, Method};
pub use experiment::{
    hypothesis_table, improvement_pct, load_instance, read_rows, run_cell, run_experiment, summarize, write_rows,
    CellSummary, Experiment, HypothesisRow, ResultRow,
};
pub use stats::{cohens_d_paired, wilcoxon_signed_rank, StatsError, WilcoxonResult};

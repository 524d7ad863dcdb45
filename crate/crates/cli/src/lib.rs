//! Experiment runner for regressor chains: config parsing, the CV grid, result
//! tables and particle-path export.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod export;
pub mod runner;
pub mod table;

pub use config::{ConfigError, ExperimentConfig};
pub use export::{export_paths, read_paths, PathRecord};
pub use runner::{run_experiment, RunSummary};
pub use table::{render_table, Metric, ResultGrid, TableFormat};

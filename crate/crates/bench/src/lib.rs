//! Desk-scale privacy-utility benchmarks for `dpscd`.
//!
//! An [`ExperimentConfig`] names a dataset, the algorithms to compare, an
//! `ε` grid and hyperparameter grids. [`run_suite`] tunes each private
//! algorithm on a validation split at every `ε` (calibrating `σ` separately
//! for every grid point, since `q` and `T` depend on the batch size), reruns
//! the winner on every seed, and writes three CSV files:
//!
//! * `tradeoff.csv`: validation and test utility against `ε`;
//! * `convergence.csv`: primal objective per epoch for the tuned runs, plus
//!   the dual objective (and noiseless duality gap) for dual methods;
//! * `lc_sweep.csv`: validation utility over the whole grid at one `ε`.
//!
//! Each row carries the per-seed values next to their median, so every
//! reported number can be recomputed from the file itself.

// `!(x > 0.0)` is used on purpose so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod error;
mod grid;
mod metrics;
mod prepare;
mod suite;

pub use config::{decade_grid, DatasetSource, ExperimentConfig, PAPER_BATCH_SIZES};
pub use error::{BenchError, Result};
pub use grid::{
    grid_points, grid_search, search_points, solver_config, train_run, Calibrations, GridPoint, GridResult,
    PointOutcome, TuningData,
};
pub use metrics::{evaluate, median, quantile, write_csv, Metric, MetricRow, RowKey, Split, CSV_COLUMNS};
pub use prepare::{prepare, PreparedData, PrimalView};
pub use suite::{
    collect_rows, run_suite, thread_pool, SuiteOutput, SuiteRows, CONVERGENCE_CSV, LC_SWEEP_CSV, TRADEOFF_CSV,
};

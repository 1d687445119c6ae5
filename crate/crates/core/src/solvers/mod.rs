//! Training loops: SDCA, DP-SCD and its primal and sequential variants, SGD
//! and DP-SGD.
//!
//! All solvers share one seeding contract. A run's master seed expands into
//! named substreams (see [`crate::rng`]): the initial shuffle, batch
//! sampling, noise on the model and noise on the auxiliary vector each draw
//! from their own stream, so diagnostics or reordering cannot shift them.
//!
//! Epoch accounting: one epoch is `ceil(units / L)` outer iterations, where
//! the units are examples for the dual solvers and SGD and features for the
//! primal solver. The privacy budget must be calibrated for exactly that
//! many mechanisms (see [`accounting`]).

mod config;
mod consistency;
mod dual;
mod primal;
mod record;
mod sampling;
mod sgd;

pub use config::{accounting, Algorithm, SolverConfig};
pub use consistency::{
    consistency_in_expectation_check, consistency_in_expectation_check_with, ConsistencyReport, MIN_CONSISTENCY_RUNS,
};
pub use dual::{
    clip, compute_batch_update, compute_sequential_update, train_dpscd, train_sdca, train_seqdpscd, BatchUpdate,
    DualSolver,
};
pub use primal::{compute_primal_update, train_primal_dpscd, PrimalSolver};
pub use record::{EpochRecord, Iterate, RunRecord};
pub use sgd::{clipped_gradient, train_dpsgd, train_sgd, SgdSolver};

use crate::data::Dataset;
use crate::error::Result;

/// Trains with whichever algorithm the configuration names.
pub fn train(data: &Dataset, config: &SolverConfig) -> Result<(Vec<f64>, RunRecord)> {
    match config.algorithm {
        Algorithm::Sdca => train_sdca(data, config),
        Algorithm::DpScd => train_dpscd(data, config),
        Algorithm::SeqDpScd => train_seqdpscd(data, config),
        Algorithm::PrimalDpScd => train_primal_dpscd(data, config),
        Algorithm::Sgd => train_sgd(data, config),
        Algorithm::DpSgd => train_dpsgd(data, config),
    }
}

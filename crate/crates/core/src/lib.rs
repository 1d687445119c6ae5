//! Differentially private stochastic coordinate descent for generalized
//! linear models.
//!
//! The crate is organised around the four layers of a private training run:
//!
//! * [`data`]: LIBSVM ingestion, normalization, label conventions and
//!   deterministic splits.
//! * [`glm`]: primal and dual objectives, conjugate losses, the duality gap
//!   and the one-dimensional coordinate subproblems.
//! * [`privacy`]: the Gaussian mechanism, per-variant sensitivities, the
//!   moments accountant and noise calibration.
//! * [`solvers`]: SDCA, DP-SCD (independent mini-batch updates), its primal
//!   and sequential variants, SGD and DP-SGD under one seeding contract.
//!
//! Cost model: one outer iteration of the dual solvers touches the `L`
//! sampled columns of `X` plus a dense `M`-vector of noise, so a run costs
//! `O(T * (L * nnz_col + M))`. Once noise is added the auxiliary vector is
//! dense, so sparsity only pays off inside `X` itself.

// `!(x > 0.0)` is used on purpose so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod glm;
pub mod privacy;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};

//! Monte-Carlo check that noisy dual runs stay consistent in expectation:
//! the noise added to `α` and `v` is zero-mean, so `E[v] = X·E[α]`.

use super::config::SolverConfig;
use super::dual::DualSolver;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::glm::DualState;

/// Fewer runs than this give the test too little power to be meaningful.
pub const MIN_CONSISTENCY_RUNS: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub runs: usize,
    pub iterations: u64,
    /// `‖mean(v) − X·mean(α)‖` over the runs.
    pub residual: f64,
    /// Predicted standard error of that residual under pure noise.
    pub standard_error: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Runs `runs` independently seeded copies of a dual solver for `iterations`
/// outer iterations and compares the averaged `v` with `X` times the
/// averaged `α`.
///
/// Within a run the noiseless updates keep `Δv = XΔα` exactly, so
/// `v − Xα` is the accumulated noise. With per-coordinate std `s`, each
/// iteration contributes variance `s²·M` from `v` and `s²·Σ_{j∈B}‖x_j‖²`
/// from `α`, so the predicted standard error of the averaged residual is
/// `s·√(t·(M + L·mean‖x‖²)/R)`. The check passes below four of those.
pub fn consistency_in_expectation_check(
    data: &Dataset,
    config: &SolverConfig,
    runs: usize,
    iterations: u64,
) -> Result<ConsistencyReport> {
    consistency_in_expectation_check_with(data, config, runs, iterations, |_| {})
}

/// As [`consistency_in_expectation_check`], with `tamper` applied to every
/// final state before averaging (for negative controls).
pub fn consistency_in_expectation_check_with(
    data: &Dataset,
    config: &SolverConfig,
    runs: usize,
    iterations: u64,
    mut tamper: impl FnMut(&mut DualState),
) -> Result<ConsistencyReport> {
    if runs < MIN_CONSISTENCY_RUNS {
        return Err(Error::InvalidArgument(format!(
            "consistency check needs at least {MIN_CONSISTENCY_RUNS} runs, got {runs}"
        )));
    }
    let (n, m) = (data.n_examples(), data.n_features());
    let mut mean_alpha = vec![0.0; n];
    let mut mean_v = vec![0.0; m];
    let mut std = 0.0;
    for r in 0..runs {
        let cfg = config.clone().seed(config.seed.wrapping_add(r as u64));
        let mut solver = DualSolver::new(data, &cfg)?;
        std = solver.noise_std();
        for _ in 0..iterations {
            solver.step();
        }
        let mut state = solver.into_state();
        tamper(&mut state);
        for (a, x) in mean_alpha.iter_mut().zip(&state.alpha) {
            *a += x / runs as f64;
        }
        for (a, x) in mean_v.iter_mut().zip(&state.v) {
            *a += x / runs as f64;
        }
    }
    let xa = data.mul(&mean_alpha)?;
    let residual = mean_v
        .iter()
        .zip(&xa)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let mean_sq_norm = data.example_sq_norms().iter().sum::<f64>() / n as f64;
    let per_iter = m as f64 + config.batch_size as f64 * mean_sq_norm;
    let standard_error = std * (iterations as f64 * per_iter / runs as f64).sqrt();
    let threshold = 4.0 * standard_error + 1e-9;
    Ok(ConsistencyReport {
        runs,
        iterations,
        residual,
        standard_error,
        threshold,
        passed: residual <= threshold,
    })
}

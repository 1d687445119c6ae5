mod common;

use common::*;
use dpscd::glm::Loss;
use dpscd::privacy::PrivacyBudget;
use dpscd::solvers::*;

const ITERATIONS: u64 = 50;

fn config(sigma: f64) -> SolverConfig {
    let data_n = 100;
    let (q, t) = accounting(Algorithm::DpScd, data_n, 5, 10, 5);
    let budget = if sigma == 0.0 {
        PrivacyBudget::noiseless()
    } else {
        PrivacyBudget::with_sigma(sigma, 1e-3, q, t).unwrap()
    };
    SolverConfig::new(Algorithm::DpScd, Loss::Ridge, LAMBDA)
        .batch_size(10)
        .scale(0.5)
        .epochs(5)
        .privacy(budget)
}

#[test]
fn noiseless_runs_are_exactly_consistent() {
    let data = ridge_instance(100, 5, 1);
    let r = consistency_in_expectation_check(&data, &config(0.0), 30, ITERATIONS).unwrap();
    assert!(r.residual <= 1e-9, "{}", r.residual);
    assert!(r.passed);
}

#[test]
fn noisy_runs_are_consistent_in_expectation() {
    let data = ridge_instance(100, 5, 2);
    let r = consistency_in_expectation_check(&data, &config(1.0), 1000, ITERATIONS).unwrap();
    assert!(r.passed, "{r:?}");
    assert!(r.standard_error > 0.0);
}

#[test]
fn tampered_auxiliary_vector_fails() {
    let data = ridge_instance(100, 5, 3);
    let cfg = config(1.0);
    let honest = consistency_in_expectation_check(&data, &cfg, 200, ITERATIONS).unwrap();
    let shift = 10.0 * honest.standard_error;
    let r = consistency_in_expectation_check_with(&data, &cfg, 200, ITERATIONS, |s| {
        s.v.iter_mut().for_each(|x| *x += shift)
    })
    .unwrap();
    assert!(!r.passed, "{r:?}");
}

#[test]
fn refuses_underpowered_checks() {
    let data = ridge_instance(100, 5, 4);
    assert!(consistency_in_expectation_check(&data, &config(1.0), 29, ITERATIONS).is_err());
}

#[test]
fn residual_shrinks_like_inverse_sqrt_runs() {
    // RMS residual over disjoint seed blocks: 16 blocks of R and 4 of 4R.
    let data = ridge_instance(100, 5, 5);
    let base = config(1.0);
    let rms = |runs: usize, blocks: u64| -> f64 {
        let total: f64 = (0..blocks)
            .map(|b| {
                let cfg = base.clone().seed(1_000_000 * (runs as u64) + b * runs as u64);
                let r = consistency_in_expectation_check(&data, &cfg, runs, ITERATIONS).unwrap();
                r.residual * r.residual
            })
            .sum();
        (total / blocks as f64).sqrt()
    };
    let ratio = rms(250, 16) / rms(1000, 4);
    assert!((1.4..=2.8).contains(&ratio), "{ratio}");
}

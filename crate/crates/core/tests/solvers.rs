mod common;

use common::*;
use dpscd::data::Dataset;
use dpscd::glm::{dual_objective_with_aux, primal_objective, sgd_gradient, DualState, Loss};
use dpscd::privacy::{sensitivity, PrivacyBudget, SensitivityVariant};
use dpscd::solvers::*;
use dpscd::Error;

fn noiseless_dpscd(l: usize, c: f64) -> SolverConfig {
    SolverConfig::new(Algorithm::DpScd, Loss::Ridge, LAMBDA)
        .batch_size(l)
        .scale(c)
        .privacy(PrivacyBudget::noiseless())
}

fn noisy(algorithm: Algorithm, data: &Dataset, l: usize, c: f64, sigma: f64, epochs: usize) -> SolverConfig {
    let (q, t) = accounting(algorithm, data.n_examples(), data.n_features(), l, epochs);
    SolverConfig::new(algorithm, Loss::Ridge, LAMBDA)
        .batch_size(l)
        .scale(c)
        .epochs(epochs)
        .privacy(PrivacyBudget::with_sigma(sigma, 1e-3, q, t).unwrap())
}

#[test]
fn dpscd_without_noise_or_scaling_is_sdca() {
    let data = ridge_instance(200, 10, 1);
    let sdca = SolverConfig::new(Algorithm::Sdca, Loss::Ridge, LAMBDA)
        .epochs(100)
        .seed(5)
        .record_iterates(true);
    let dp = noiseless_dpscd(1, 1e12).epochs(100).seed(5).record_iterates(true);
    let (ts, rs) = train_sdca(&data, &sdca).unwrap();
    let (td, rd) = train_dpscd(&data, &dp).unwrap();
    for (a, b) in rs.iterates.iter().zip(&rd.iterates) {
        assert!(max_abs_diff(&a.model, &b.model) <= 1e-10);
        assert!(max_abs_diff(&a.aux, &b.aux) <= 1e-10);
    }
    assert!(max_abs_diff(&ts, &td) <= 1e-10);

    let opt = ridge_optimum(&data, LAMBDA);
    let f_opt = primal_objective(&opt, &data, LAMBDA, Loss::Ridge).unwrap();
    for r in [&rs, &rd] {
        assert!(r.final_primal() - f_opt <= 1e-6);
        assert!(r.epochs.last().unwrap().gap.unwrap() <= 1e-8);
        assert_eq!(r.epochs.len(), 101);
    }
}

#[test]
fn mini_batch_dpscd_reaches_the_normal_equations_solution() {
    let data = ridge_instance(200, 10, 2);
    let cfg = noiseless_dpscd(10, f64::INFINITY).epochs(100);
    let (theta, record) = train_dpscd(&data, &cfg).unwrap();
    let opt = ridge_optimum(&data, LAMBDA);
    assert!(max_abs_diff(&theta, &opt) <= 1e-6, "{}", max_abs_diff(&theta, &opt));
    assert!(record.epochs.last().unwrap().gap.unwrap() <= 1e-8);
}

#[test]
fn single_sdca_update_solves_a_one_example_problem() {
    let data = Dataset::from_dense(2, &[vec![0.6, 0.8]], vec![1.5]).unwrap();
    let cfg = SolverConfig::new(Algorithm::Sdca, Loss::Ridge, 0.5);
    let mut solver = DualSolver::new(&data, &cfg).unwrap();
    solver.step();
    // argmin α²/2 − αy + ‖x‖²α²/(2λ)  ⇒  α = y / (1 + ‖x‖²/λ).
    let exact = 1.5 / (1.0 + 1.0 / 0.5);
    assert!((solver.state().alpha[0] - exact).abs() < 1e-15);
}

#[test]
fn noiseless_dual_objective_never_increases() {
    let data = ridge_instance(200, 10, 3);
    let (_, rec) = train_sdca(
        &data,
        &SolverConfig::new(Algorithm::Sdca, Loss::Ridge, LAMBDA).epochs(50),
    )
    .unwrap();
    for w in rec.epochs.windows(2) {
        assert!(w[1].dual.unwrap() <= w[0].dual.unwrap() + 1e-12);
    }
    // Per outer iteration, for each loss and with active scaling.
    for (loss, data) in [
        (Loss::Ridge, ridge_instance(60, 5, 4)),
        (Loss::Logistic, classification_instance(60, 5, 4)),
        (Loss::Hinge, classification_instance(60, 5, 5)),
    ] {
        let cfg = SolverConfig {
            loss,
            ..noiseless_dpscd(8, 0.05)
        };
        let mut s = DualSolver::new(&data, &cfg).unwrap();
        let f = |s: &DualSolver| {
            let st = s.state();
            dual_objective_with_aux(&st.alpha, &st.v, &data, LAMBDA, loss).unwrap()
        };
        let mut prev = f(&s);
        for _ in 0..500 {
            s.step();
            let cur = f(&s);
            assert!(cur <= prev + 1e-12, "{loss}: {cur} > {prev}");
            prev = cur;
        }
    }
}

#[test]
fn scaling_bounds_every_update() {
    let data = ridge_instance(100, 5, 6);
    for alg in [Algorithm::DpScd, Algorithm::SeqDpScd] {
        let cfg = noisy(alg, &data, 7, 0.01, 2.0, 5);
        let mut s = DualSolver::new(&data, &cfg).unwrap();
        for _ in 0..200 {
            let u = s.step();
            assert!(u.zetas.iter().all(|z| z.abs() <= 0.01));
            assert!(u.zetas.iter().any(|z| z.abs() == 0.01));
        }
    }
    let data = row_normalized_ridge(100, 6, 6);
    let cfg = noisy(Algorithm::PrimalDpScd, &data, 3, 0.01, 2.0, 5);
    let mut s = PrimalSolver::new(&data, &cfg).unwrap();
    for _ in 0..200 {
        assert!(s.step().zetas.iter().all(|z| z.abs() <= 0.01));
    }
}

#[test]
fn theta_is_read_from_the_auxiliary_vector() {
    let data = ridge_instance(100, 5, 7);
    let cfg = noisy(Algorithm::DpScd, &data, 5, 0.5, 1.0, 3).record_iterates(true);
    let (theta, rec) = train_dpscd(&data, &cfg).unwrap();
    let last = rec.iterates.last().unwrap();
    let expected: Vec<f64> = last.aux.iter().map(|v| v * (1.0 / (LAMBDA * 100.0))).collect();
    assert_eq!(theta, expected);
    let state = DualState {
        alpha: last.model.clone(),
        v: last.aux.clone(),
        lambda: LAMBDA,
    };
    assert_eq!(state.theta(), theta);
    // Noise broke exact consistency, so Xα would give a different model.
    assert!(state.consistency_residual(&data).unwrap() > 1e-3);
}

#[test]
fn alpha_noise_touches_only_the_sampled_coordinates() {
    let data = ridge_instance(100, 5, 8);
    let cfg = noisy(Algorithm::DpScd, &data, 4, 0.5, 3.0, 2);
    let mut s = DualSolver::new(&data, &cfg).unwrap();
    for _ in 0..100 {
        let before = s.state().clone();
        let u = s.step();
        let after = s.state();
        for i in 0..100 {
            let touched = u.indices.contains(&i);
            assert_eq!(before.alpha[i] != after.alpha[i], touched, "coordinate {i}");
        }
        assert!(before.v.iter().zip(&after.v).all(|(a, b)| a != b));
    }
}

#[test]
fn independent_update_ignores_batch_order() {
    let data = ridge_instance(80, 6, 9);
    let cfg = noisy(Algorithm::DpScd, &data, 6, 0.2, 1.0, 2);
    let mut s = DualSolver::new(&data, &cfg).unwrap();
    for _ in 0..20 {
        s.step();
    }
    let state = s.state().clone();
    let batch = vec![17, 3, 42, 8, 61, 29];
    let reference = compute_batch_update(&data, Loss::Ridge, &state, &batch, 6, 0.2);
    let mut perm = batch.clone();
    for k in 0..50 {
        perm.rotate_left(1);
        if k % 3 == 0 {
            perm.swap(0, 4);
        }
        assert_eq!(
            compute_batch_update(&data, Loss::Ridge, &state, &perm, 6, 0.2),
            reference
        );
    }
}

#[test]
fn sequential_updates_see_earlier_ones() {
    // Two identical examples: the first update moves v, which the second sees.
    let data = Dataset::from_dense(2, &[vec![1.0, 0.0], vec![1.0, 0.0]], vec![1.0, 1.0]).unwrap();
    let state = DualState::zeros(2, 2, 1.0);
    let ind = compute_batch_update(&data, Loss::Ridge, &state, &[0, 1], 2, f64::INFINITY);
    let seq = compute_sequential_update(&data, Loss::Ridge, &state, &[0, 1], 2, f64::INFINITY);
    // Independent: ζ = (1 − 0 − 0)/(1 + 2/2) for both.
    assert_eq!(ind.zetas, vec![0.5, 0.5]);
    // Sequential: second sees xᵀv = 0.5, so ζ = (1 − 0.5/2)/2.
    assert_eq!(seq.zetas, vec![0.5, 0.375]);
}

#[test]
fn batch_size_one_variants_coincide_with_sdca() {
    let data = ridge_instance(120, 8, 10);
    let sdca = SolverConfig::new(Algorithm::Sdca, Loss::Ridge, LAMBDA)
        .epochs(10)
        .seed(3)
        .record_iterates(true);
    let seq = SolverConfig {
        algorithm: Algorithm::SeqDpScd,
        ..noiseless_dpscd(1, f64::INFINITY)
    }
    .epochs(10)
    .seed(3)
    .record_iterates(true);
    let (_, a) = train_sdca(&data, &sdca).unwrap();
    let (_, b) = train_seqdpscd(&data, &seq).unwrap();
    for (x, y) in a.iterates.iter().zip(&b.iterates) {
        assert!(max_abs_diff(&x.model, &y.model) <= 1e-12);
    }
}

#[test]
fn noise_levels_follow_the_sensitivity_table() {
    let data = ridge_instance(100, 8, 11);
    let (sigma, c, l) = (1.7, 0.3, 4);
    let dual = DualSolver::new(&data, &noisy(Algorithm::DpScd, &data, l, c, sigma, 1)).unwrap();
    assert_eq!(
        dual.noise_std(),
        sigma * sensitivity(SensitivityVariant::Dual, c, l).unwrap()
    );
    assert!((dual.noise_std() - sigma * 2f64.sqrt() * c).abs() < 1e-15);
    let seq = DualSolver::new(&data, &noisy(Algorithm::SeqDpScd, &data, l, c, sigma, 1)).unwrap();
    let expect = sigma * 2.0 * c * ((l * (l + 1)) as f64).sqrt();
    assert!((seq.noise_std() - expect).abs() < 1e-14);
    let rows = row_normalized_ridge(100, 8, 11);
    let primal = PrimalSolver::new(&rows, &noisy(Algorithm::PrimalDpScd, &rows, l, c, sigma, 1)).unwrap();
    assert!((primal.noise_std() - expect).abs() < 1e-14);
    assert!(primal.noise_std() > dual.noise_std());
}

#[test]
fn primal_solver_reaches_the_ridge_optimum() {
    let data = row_normalized_ridge(200, 10, 12);
    let cfg = SolverConfig::new(Algorithm::PrimalDpScd, Loss::Ridge, LAMBDA)
        .scale(f64::INFINITY)
        .privacy(PrivacyBudget::noiseless())
        .epochs(100);
    let (theta, rec) = train_primal_dpscd(&data, &cfg).unwrap();
    let opt = ridge_optimum(&data, LAMBDA);
    assert!(max_abs_diff(&theta, &opt) <= 1e-6, "{}", max_abs_diff(&theta, &opt));
    assert_eq!(rec.epochs.len(), 101);
    assert!(rec.epochs.iter().all(|e| e.dual.is_none() && e.gap.is_none()));
}

fn sgd(l: usize, eta: f64) -> SolverConfig {
    SolverConfig::new(Algorithm::Sgd, Loss::Ridge, LAMBDA)
        .batch_size(l)
        .learning_rate(eta)
}

#[test]
fn first_sgd_step_is_minus_eta_gradient() {
    let data = ridge_instance(50, 4, 13);
    let mut s = SgdSolver::new(&data, &sgd(5, 0.3)).unwrap();
    let batch = s.step();
    let g = sgd_gradient(&[0.0; 4], &batch, &data, LAMBDA, Loss::Ridge).unwrap();
    for (t, gj) in s.theta().iter().zip(&g) {
        assert!((t + 0.3 * gj).abs() < 1e-15);
    }
}

#[test]
fn full_batch_sgd_on_a_quadratic_decreases_monotonically() {
    let data = Dataset::from_dense(1, &[vec![1.0], vec![0.5], vec![-0.8]], vec![2.0, 1.0, -1.0]).unwrap();
    // Curvature is mean(x²) + λ ≈ 0.73; η well below its inverse.
    let cfg = sgd(3, 0.5).epochs(40);
    let (_, rec) = train_sgd(&data, &cfg).unwrap();
    for w in rec.epochs.windows(2) {
        assert!(w[1].primal < w[0].primal);
    }
}

#[test]
fn sgd_approaches_the_ridge_optimum() {
    let data = ridge_instance(200, 10, 14);
    let opt = ridge_optimum(&data, LAMBDA);
    let f_opt = primal_objective(&opt, &data, LAMBDA, Loss::Ridge).unwrap();
    // Tune (|ξ|, η) over a small grid, as the SGD baselines are tuned.
    let mut best = f64::INFINITY;
    for l in [10, 50, 200] {
        for eta in [0.03, 0.1, 0.3, 1.0, 3.0] {
            let (_, rec) = train_sgd(&data, &sgd(l, eta).epochs(100)).unwrap();
            best = best.min(rec.final_primal() - f_opt);
        }
    }
    assert!(best <= 1e-4, "{best}");
}

#[test]
fn dpsgd_clipping_contract() {
    let data = classification_instance(40, 5, 15);
    let theta = vec![2.0, -1.0, 0.5, 0.0, 3.0];
    for c in [1e-3, 0.1, 0.7] {
        for i in 0..40 {
            let g = clipped_gradient(&theta, &[i], &data, 0.0, Loss::Logistic, c);
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(norm <= c * (1.0 + 1e-12), "{norm} > {c}");
        }
    }
    // With a huge C nothing is clipped.
    let batch: Vec<usize> = (0..40).step_by(3).collect();
    let a = clipped_gradient(&theta, &batch, &data, LAMBDA, Loss::Logistic, 1e12);
    let b = sgd_gradient(&theta, &batch, &data, LAMBDA, Loss::Logistic).unwrap();
    assert!(max_abs_diff(&a, &b) <= 1e-12);
}

#[test]
fn dpsgd_without_noise_or_clipping_is_sgd() {
    let data = ridge_instance(100, 6, 16);
    let plain = sgd(10, 0.5).epochs(5).seed(21).record_iterates(true);
    let dp = SolverConfig {
        algorithm: Algorithm::DpSgd,
        ..plain.clone()
    }
    .scale(f64::INFINITY)
    .privacy(PrivacyBudget::noiseless());
    let (a, ra) = train_sgd(&data, &plain).unwrap();
    let (b, rb) = train_dpsgd(&data, &dp).unwrap();
    assert_eq!(a, b);
    assert_eq!(ra.iterates, rb.iterates);
}

#[test]
fn dpsgd_noise_scale() {
    let data = ridge_instance(100, 6, 17);
    let cfg = SolverConfig::new(Algorithm::DpSgd, Loss::Ridge, LAMBDA)
        .batch_size(10)
        .learning_rate(0.1)
        .scale(2.0)
        .epochs(1);
    let (q, t) = accounting(Algorithm::DpSgd, 100, 6, 10, 1);
    let cfg = cfg.privacy(PrivacyBudget::with_sigma(3.0, 1e-3, q, t).unwrap());
    assert_eq!(SgdSolver::new(&data, &cfg).unwrap().noise_std(), 3.0 * 2.0 / 10.0);
}

#[test]
fn identical_configs_give_identical_records() {
    let data = ridge_instance(100, 6, 18);
    for alg in [Algorithm::DpScd, Algorithm::SeqDpScd, Algorithm::DpSgd] {
        let mut cfg = noisy(alg, &data, 5, 0.3, 1.5, 3).seed(77).record_iterates(true);
        if alg == Algorithm::DpSgd {
            cfg = cfg.learning_rate(0.2);
        }
        let (_, a) = train(&data, &cfg).unwrap();
        let (_, b) = train(&data, &cfg).unwrap();
        assert_eq!(a, b);
        let (_, c) = train(&data, &cfg.clone().seed(78)).unwrap();
        assert_ne!(a.theta, c.theta);
    }
}

#[test]
fn configuration_errors() {
    let data = ridge_instance(20, 3, 19);
    let too_big = noiseless_dpscd(21, 1.0);
    assert!(matches!(train_dpscd(&data, &too_big), Err(Error::InvalidConfig(_))));
    let no_budget = SolverConfig::new(Algorithm::DpScd, Loss::Ridge, LAMBDA).scale(1.0);
    assert!(matches!(
        train_dpscd(&data, &no_budget),
        Err(Error::UncalibratedBudget(_))
    ));
    let wrong = SolverConfig::new(Algorithm::Sdca, Loss::Ridge, LAMBDA);
    assert!(train_dpscd(&data, &wrong).is_err());
    assert!(train_sgd(&data, &sgd(2, 0.0)).is_err());
    // Budget computed for a different batch size.
    let cfg = noisy(Algorithm::DpScd, &data, 2, 1.0, 1.0, 1).batch_size(4);
    assert!(matches!(train_dpscd(&data, &cfg), Err(Error::UncalibratedBudget(_))));
}

//! Hyperparameter grids, per-point noise calibration and validation-based
//! selection.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Mutex;

use dpscd::data::{Dataset, Task};
use dpscd::glm::primal_objective;
use dpscd::privacy::PrivacyBudget;
use dpscd::solvers::{accounting, train, Algorithm, RunRecord, SolverConfig};
use log::{debug, info};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{BenchError, Result};
use crate::metrics::{evaluate, median, Metric};
use crate::prepare::{PreparedData, PrimalView};

/// One hyperparameter combination. Knobs the algorithm lacks are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub batch_size: usize,
    pub scale: Option<f64>,
    pub learning_rate: Option<f64>,
}

impl GridPoint {
    /// Lexicographic order on `(C, L, η)`, the grid-search tie-break.
    pub fn tie_break(&self, other: &GridPoint) -> Ordering {
        let opt = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(x), Some(y)) => x.total_cmp(&y),
            (a, b) => a.is_some().cmp(&b.is_some()),
        };
        opt(self.scale, other.scale)
            .then(self.batch_size.cmp(&other.batch_size))
            .then(opt(self.learning_rate, other.learning_rate))
    }
}

/// The grid an algorithm is tuned over, sorted by [`GridPoint::tie_break`].
///
/// SDCA has nothing to tune and runs with `L = 1`. SGD tunes `(η, |ξ|)`,
/// the private coordinate solvers `(C, L)` and DP-SGD `(C, |ξ|, η)`.
pub fn grid_points(config: &ExperimentConfig, algorithm: Algorithm) -> Vec<GridPoint> {
    if algorithm == Algorithm::Sdca {
        return vec![GridPoint {
            batch_size: 1,
            scale: None,
            learning_rate: None,
        }];
    }
    let scales: Vec<Option<f64>> = if algorithm.uses_scale() {
        config.scales.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let rates: Vec<Option<f64>> = if algorithm.uses_learning_rate() {
        config.learning_rates.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let mut points = Vec::new();
    for &scale in &scales {
        for &batch_size in &config.batch_sizes {
            for &learning_rate in &rates {
                points.push(GridPoint {
                    batch_size,
                    scale,
                    learning_rate,
                });
            }
        }
    }
    points.sort_by(|a, b| a.tie_break(b));
    points.dedup();
    points
}

/// The slice of [`PreparedData`] tuning may see: no test split.
#[derive(Debug, Clone, Copy)]
pub struct TuningData<'a> {
    pub task: Task,
    pub train: &'a Dataset,
    pub validation: &'a Dataset,
    pub intercept: f64,
    pub primal: &'a PrimalView,
}

impl PreparedData {
    pub fn tuning(&self) -> TuningData<'_> {
        TuningData {
            task: self.task,
            train: &self.train,
            validation: &self.validation,
            intercept: self.intercept,
            primal: &self.primal,
        }
    }
}

/// Bit patterns of `(ε, δ, q, T)`.
type CalibrationKey = (u64, u64, u64, u64);

/// Memoized noise calibration keyed on everything `σ` depends on.
#[derive(Debug, Default)]
pub struct Calibrations {
    cache: Mutex<HashMap<CalibrationKey, std::result::Result<PrivacyBudget, String>>>,
}

impl Calibrations {
    pub fn new() -> Self {
        Self::default()
    }

    /// Budget for one run, or `None` for non-private algorithms.
    pub fn budget(
        &self,
        config: &ExperimentConfig,
        algorithm: Algorithm,
        epsilon: f64,
        point: &GridPoint,
        n_examples: usize,
        n_features: usize,
    ) -> std::result::Result<Option<PrivacyBudget>, String> {
        if !algorithm.is_private() {
            return Ok(None);
        }
        let (q, t) = accounting(algorithm, n_examples, n_features, point.batch_size, config.epochs);
        let key = (epsilon.to_bits(), config.delta.to_bits(), q.to_bits(), t);
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return hit.clone().map(Some);
        }
        // Computed outside the lock; a racing duplicate gives the same value.
        let fresh = PrivacyBudget::calibrate(epsilon, config.delta, q, t).map_err(|e| e.to_string());
        self.cache.lock().unwrap().insert(key, fresh.clone());
        fresh.map(Some)
    }

    pub fn len(&self) -> usize {
        self.cache.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn solver_config(
    config: &ExperimentConfig,
    algorithm: Algorithm,
    point: &GridPoint,
    budget: Option<PrivacyBudget>,
    seed: u64,
) -> SolverConfig {
    SolverConfig {
        algorithm,
        loss: config.loss,
        lambda: config.lambda,
        epochs: config.epochs,
        batch_size: point.batch_size,
        scale: point.scale,
        learning_rate: point.learning_rate,
        privacy: budget,
        seed,
        record_iterates: false,
    }
}

/// Trains on the training split and returns `θ` in the original feature
/// space along with the run record. The primal solver trains on the
/// rescaled copy in [`PrimalView`]; its recorded objectives are recomputed
/// on the original training data so every algorithm reports the same `F(θ)`.
pub fn train_run(data: TuningData<'_>, cfg: &SolverConfig) -> dpscd::Result<(Vec<f64>, RunRecord)> {
    if cfg.algorithm != Algorithm::PrimalDpScd {
        return train(data.train, cfg);
    }
    let view = data.primal;
    let scaled_cfg = SolverConfig {
        lambda: view.lambda(cfg.lambda),
        record_iterates: true,
        ..cfg.clone()
    };
    let (theta, mut record) = train(&view.data, &scaled_cfg)?;
    for (epoch, it) in record.epochs.iter_mut().zip(&record.iterates) {
        epoch.primal = primal_objective(&view.unscale(&it.model), data.train, cfg.lambda, cfg.loss)?;
    }
    if !cfg.record_iterates {
        record.iterates.clear();
    }
    let theta = view.unscale(&theta);
    record.theta.clone_from(&theta);
    Ok((theta, record))
}

/// Per-seed outcome of every grid point.
#[derive(Debug, Clone)]
pub struct PointOutcome {
    pub point: GridPoint,
    /// `σ` the point was calibrated to; `None` if calibration failed or the
    /// algorithm is not private.
    pub budget: Option<PrivacyBudget>,
    /// Validation metric per seed, or why the point failed.
    pub validation: std::result::Result<Vec<f64>, String>,
}

impl PointOutcome {
    pub fn median(&self) -> Option<f64> {
        self.validation.as_ref().ok().map(|v| median(v))
    }
}

#[derive(Debug, Clone)]
pub struct GridResult {
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub best: PointOutcome,
    pub outcomes: Vec<PointOutcome>,
}

/// Trains every grid point for every seed and picks the best median
/// validation metric. Ties keep the earliest point in `(C, L, η)` order.
///
/// A point fails if calibration fails, the solver rejects it (e.g. `L = 0`
/// or `L > N`), or any seed produces a non-finite metric.
pub fn grid_search(
    data: TuningData<'_>,
    config: &ExperimentConfig,
    algorithm: Algorithm,
    epsilon: f64,
    calibrations: &Calibrations,
) -> Result<GridResult> {
    let points = grid_points(config, algorithm);
    search_points(data, config, algorithm, epsilon, &points, calibrations)
}

/// [`grid_search`] over an explicit list of points.
pub fn search_points(
    data: TuningData<'_>,
    config: &ExperimentConfig,
    algorithm: Algorithm,
    epsilon: f64,
    points: &[GridPoint],
    calibrations: &Calibrations,
) -> Result<GridResult> {
    let metric = Metric::for_task(data.task);
    let (n, m) = (data.train.n_examples(), data.train.n_features());
    let budgets: Vec<_> = points
        .par_iter()
        .map(|p| calibrations.budget(config, algorithm, epsilon, p, n, m))
        .collect();
    let seeds = config.run_seeds();
    let jobs: Vec<(usize, u64)> = (0..points.len())
        .filter(|&i| budgets[i].is_ok())
        .flat_map(|i| seeds.iter().map(move |&s| (i, s)))
        .collect();
    let results: Vec<std::result::Result<f64, String>> = jobs
        .par_iter()
        .map(|&(i, seed)| {
            let budget = budgets[i].clone().expect("filtered");
            let cfg = solver_config(config, algorithm, &points[i], budget, seed);
            let (theta, _) = train_run(data, &cfg).map_err(|e| e.to_string())?;
            let v = evaluate(&theta, data.intercept, data.validation, data.task).map_err(|e| e.to_string())?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("non-finite validation {metric} with seed {seed}"))
            }
        })
        .collect();

    let mut per_point: Vec<std::result::Result<Vec<f64>, String>> =
        budgets.iter().map(|b| b.clone().map(|_| Vec::new())).collect();
    for (&(i, _), r) in jobs.iter().zip(results) {
        if let Ok(values) = &mut per_point[i] {
            match r {
                Ok(v) => values.push(v),
                Err(e) => per_point[i] = Err(e),
            }
        }
    }
    let outcomes: Vec<PointOutcome> = points
        .iter()
        .zip(budgets)
        .zip(per_point)
        .map(|((p, b), v)| PointOutcome {
            point: *p,
            budget: b.ok().flatten(),
            validation: v,
        })
        .collect();

    let better = |a: f64, b: f64| if metric.higher_is_better() { a > b } else { a < b };
    let mut best: Option<(usize, f64)> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if let Some(med) = o.median() {
            if best.is_none_or(|(_, b)| better(med, b)) {
                best = Some((i, med));
            }
        }
    }
    let failed = outcomes.iter().filter(|o| o.validation.is_err()).count();
    if failed > 0 {
        debug!(
            "{algorithm} at epsilon {epsilon}: {failed} of {} grid points failed",
            outcomes.len()
        );
    }
    let Some((i, med)) = best else {
        let failures = outcomes
            .iter()
            .filter_map(|o| o.validation.as_ref().err().map(|e| format!("{:?}: {e}", o.point)))
            .collect();
        return Err(BenchError::AllPointsFailed {
            algorithm: algorithm.to_string(),
            epsilon,
            failures,
        });
    };
    info!(
        "{algorithm} epsilon {epsilon}: best {:?} with median validation {metric} {med}",
        outcomes[i].point
    );
    Ok(GridResult {
        algorithm,
        epsilon,
        best: outcomes[i].clone(),
        outcomes,
    })
}

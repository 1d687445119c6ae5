//! The full experiment: tune every algorithm at every `ε`, rerun the winner,
//! and write `tradeoff.csv`, `convergence.csv` and `lc_sweep.csv`.

use std::path::PathBuf;
use std::time::Instant;

use dpscd::solvers::Algorithm;
use log::{info, warn};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{BenchError, Result};
use crate::grid::{grid_search, solver_config, train_run, Calibrations, GridResult, PointOutcome};
use crate::metrics::{evaluate, write_csv, Metric, MetricRow, RowKey, Split};
use crate::prepare::{prepare, PreparedData};

pub const TRADEOFF_CSV: &str = "tradeoff.csv";
pub const CONVERGENCE_CSV: &str = "convergence.csv";
pub const LC_SWEEP_CSV: &str = "lc_sweep.csv";

/// Rows of the three output files, in file order.
#[derive(Debug, Clone, Default)]
pub struct SuiteRows {
    /// Validation and test utility of the tuned configuration per `ε`.
    pub tradeoff: Vec<MetricRow>,
    /// Training objectives per epoch. Dual methods add the dual objective
    /// and, when noiseless, the duality gap.
    pub convergence: Vec<MetricRow>,
    /// Validation utility of every successful grid point at the sweep `ε`.
    pub lc_sweep: Vec<MetricRow>,
}

#[derive(Debug, Clone)]
pub struct SuiteOutput {
    pub rows: SuiteRows,
    pub tradeoff: PathBuf,
    pub convergence: PathBuf,
    pub lc_sweep: PathBuf,
}

/// Worker pool honouring `BENCH_THREADS`.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("BENCH_THREADS") {
        match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => builder = builder.num_threads(n),
            _ => warn!("ignoring BENCH_THREADS={raw:?}: expected a positive integer"),
        }
    }
    builder
        .build()
        .map_err(|e| BenchError::Runtime(format!("cannot start worker pool: {e}")))
}

/// Runs the experiment and writes the CSVs into `config.out_dir`.
pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteOutput> {
    config.validate()?;
    let rows = thread_pool()?.install(|| collect_rows(config))?;
    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|source| BenchError::Io {
        path: dir.clone(),
        source,
    })?;
    let seeds = config.run_seeds();
    let out = SuiteOutput {
        tradeoff: dir.join(TRADEOFF_CSV),
        convergence: dir.join(CONVERGENCE_CSV),
        lc_sweep: dir.join(LC_SWEEP_CSV),
        rows,
    };
    write_csv(&out.tradeoff, &seeds, &out.rows.tradeoff)?;
    write_csv(&out.convergence, &seeds, &out.rows.convergence)?;
    write_csv(&out.lc_sweep, &seeds, &out.rows.lc_sweep)?;
    Ok(out)
}

/// Computes all rows without touching the file system.
pub fn collect_rows(config: &ExperimentConfig) -> Result<SuiteRows> {
    let data = prepare(config)?;
    info!(
        "data: {} train / {} validation / {} test examples, {} features",
        data.train.n_examples(),
        data.validation.n_examples(),
        data.test.n_examples(),
        data.train.n_features()
    );
    let calibrations = Calibrations::new();
    let mut rows = SuiteRows::default();
    for &algorithm in &config.algorithms {
        let mut epsilons = if algorithm.is_private() {
            config.epsilons.clone()
        } else {
            vec![f64::INFINITY]
        };
        let sweep_only = algorithm.is_private() && !epsilons.contains(&config.sweep_epsilon);
        if sweep_only {
            epsilons.push(config.sweep_epsilon);
        }
        for (k, &epsilon) in epsilons.iter().enumerate() {
            let started = Instant::now();
            let result = grid_search(data.tuning(), config, algorithm, epsilon, &calibrations)?;
            if algorithm.is_private() && epsilon == config.sweep_epsilon {
                rows.lc_sweep.extend(sweep_rows(config, &result));
            }
            if sweep_only && k == epsilons.len() - 1 {
                continue;
            }
            let (tradeoff, convergence) = final_rows(&data, config, &result)?;
            rows.tradeoff.extend(tradeoff);
            rows.convergence.extend(convergence);
            info!(
                "{algorithm} epsilon {epsilon} done in {:.1}s",
                started.elapsed().as_secs_f64()
            );
        }
    }
    Ok(rows)
}

fn row_key(config: &ExperimentConfig, algorithm: Algorithm, epsilon: f64, outcome: &PointOutcome) -> RowKey {
    RowKey {
        algorithm: algorithm.to_string(),
        epsilon,
        delta: algorithm.is_private().then_some(config.delta),
        sigma: outcome.budget.map_or(0.0, |b| b.sigma),
        batch_size: outcome.point.batch_size,
        scale: outcome.point.scale,
        learning_rate: outcome.point.learning_rate,
    }
}

fn sweep_rows(config: &ExperimentConfig, result: &GridResult) -> Vec<MetricRow> {
    let metric = Metric::for_task(config.task);
    let mut skipped = 0;
    let rows = result
        .outcomes
        .iter()
        .filter_map(|o| match &o.validation {
            Ok(values) => {
                let key = row_key(config, result.algorithm, result.epsilon, o);
                Some(MetricRow::new(&key, Split::Validation, metric, None, values.clone()))
            }
            Err(_) => {
                skipped += 1;
                None
            }
        })
        .collect();
    if skipped > 0 {
        warn!(
            "{} sweep at epsilon {}: {skipped} failed grid point(s) omitted",
            result.algorithm, result.epsilon
        );
    }
    rows
}

/// Retrains the selected point for every seed and reports test utility and
/// per-epoch training objectives. Test data is only read here, after
/// selection.
fn final_rows(
    data: &PreparedData,
    config: &ExperimentConfig,
    result: &GridResult,
) -> Result<(Vec<MetricRow>, Vec<MetricRow>)> {
    let algorithm = result.algorithm;
    let best = &result.best;
    let metric = Metric::for_task(config.task);
    let runs: Vec<_> = config
        .run_seeds()
        .par_iter()
        .map(|&seed| -> Result<_> {
            let cfg = solver_config(config, algorithm, &best.point, best.budget, seed);
            let (theta, record) = train_run(data.tuning(), &cfg)?;
            let test = evaluate(&theta, data.intercept, &data.test, data.task)?;
            Ok((test, record))
        })
        .collect::<Result<_>>()?;

    let key = row_key(config, algorithm, result.epsilon, best);
    let validation = best.validation.clone().expect("selected point succeeded");
    let test: Vec<f64> = runs.iter().map(|(t, _)| *t).collect();
    let tradeoff = vec![
        MetricRow::new(&key, Split::Validation, metric, None, validation),
        MetricRow::new(&key, Split::Test, metric, None, test),
    ];

    let n_epochs = runs[0].1.epochs.len();
    let mut convergence = Vec::new();
    for e in 0..n_epochs {
        let objective = runs.iter().map(|(_, r)| r.epochs[e].primal).collect();
        convergence.push(MetricRow::new(
            &key,
            Split::Train,
            Metric::PrimalObjective,
            Some(e),
            objective,
        ));
        let duals: Option<Vec<f64>> = runs.iter().map(|(_, r)| r.epochs[e].dual).collect();
        if let Some(duals) = duals {
            convergence.push(MetricRow::new(
                &key,
                Split::Train,
                Metric::DualObjective,
                Some(e),
                duals,
            ));
        }
        let gaps: Option<Vec<f64>> = runs.iter().map(|(_, r)| r.epochs[e].gap).collect();
        if let Some(gaps) = gaps {
            convergence.push(MetricRow::new(&key, Split::Train, Metric::DualityGap, Some(e), gaps));
        }
    }
    Ok((tradeoff, convergence))
}

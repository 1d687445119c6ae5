use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;

use super::config::{Algorithm, SolverConfig};
use super::record::{EpochRecord, Iterate, RunRecord};
use super::sampling::BatchSampler;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::glm::{dual_objective_with_aux, primal_objective, solve_subproblem, CoordinateContext, DualState, Loss};
use crate::privacy::{gaussian_perturb, noise_std, perturb_coordinates, sensitivity};
use crate::rng::{substream, Stream};

/// Caps `|ζ|` at `C`: the scaling step `ζ / max(1, |ζ|/C)`, written so the
/// bound holds exactly in floating point.
pub fn clip(zeta: f64, c: f64) -> f64 {
    if zeta.abs() > c {
        c.copysign(zeta)
    } else {
        zeta
    }
}

/// The noiseless part of one outer iteration: sparse `Δα` (`zetas` at
/// `indices`) and dense `Δv`.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchUpdate {
    pub indices: Vec<usize>,
    pub zetas: Vec<f64>,
    pub delta_v: Vec<f64>,
}

impl BatchUpdate {
    /// `‖[Δα; Δv] − [Δα'; Δv']‖`, aligning `Δα` by index.
    pub fn difference_norm(&self, other: &BatchUpdate) -> f64 {
        let mut da: BTreeMap<usize, f64> = BTreeMap::new();
        for (&i, &z) in self.indices.iter().zip(&self.zetas) {
            *da.entry(i).or_default() += z;
        }
        for (&i, &z) in other.indices.iter().zip(&other.zetas) {
            *da.entry(i).or_default() -= z;
        }
        let a: f64 = da.values().map(|d| d * d).sum();
        let v: f64 = self
            .delta_v
            .iter()
            .zip(&other.delta_v)
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        (a + v).sqrt()
    }

    fn apply(&self, model: &mut [f64], aux: &mut [f64]) {
        for (&i, &z) in self.indices.iter().zip(&self.zetas) {
            model[i] += z;
        }
        for (a, d) in aux.iter_mut().zip(&self.delta_v) {
            *a += d;
        }
    }
}

fn coordinate(data: &Dataset, alpha: f64, v: &[f64], j: usize, batch_size: usize, lambda: f64) -> CoordinateContext {
    let x = data.example(j);
    CoordinateContext {
        alpha,
        label: data.label(j),
        xv: x.dot(v),
        sq_norm: x.sq_norm(),
        batch_size,
        lambda,
        n: data.n_examples(),
    }
}

/// Independent mini-batch update: every `ζ_j` is solved against the same
/// snapshot `(α, v)` and scaled to `|ζ_j| ≤ C`. The batch is processed in
/// ascending index order, so the result does not depend on how `batch` is
/// ordered.
pub fn compute_batch_update(
    data: &Dataset,
    loss: Loss,
    state: &DualState,
    batch: &[usize],
    batch_size: usize,
    scale: f64,
) -> BatchUpdate {
    let mut indices = batch.to_vec();
    indices.sort_unstable();
    let zetas: Vec<f64> = indices
        .iter()
        .map(|&j| {
            let ctx = coordinate(data, state.alpha[j], &state.v, j, batch_size, state.lambda);
            clip(solve_subproblem(loss, &ctx), scale)
        })
        .collect();
    let mut delta_v = vec![0.0; state.v.len()];
    for (&j, &z) in indices.iter().zip(&zetas) {
        data.example(j).axpy(z, &mut delta_v);
    }
    BatchUpdate {
        indices,
        zetas,
        delta_v,
    }
}

/// Sequential mini-batch update: each `ζ_j` sees the `v` left by the updates
/// before it, in the given order.
pub fn compute_sequential_update(
    data: &Dataset,
    loss: Loss,
    state: &DualState,
    batch: &[usize],
    batch_size: usize,
    scale: f64,
) -> BatchUpdate {
    let mut v = state.v.clone();
    let mut delta_v = vec![0.0; v.len()];
    let mut zetas = Vec::with_capacity(batch.len());
    for &j in batch {
        let ctx = coordinate(data, state.alpha[j], &v, j, batch_size, state.lambda);
        let z = clip(solve_subproblem(loss, &ctx), scale);
        let x = data.example(j);
        x.axpy(z, &mut v);
        x.axpy(z, &mut delta_v);
        zetas.push(z);
    }
    BatchUpdate {
        indices: batch.to_vec(),
        zetas,
        delta_v,
    }
}

/// Stepping driver shared by SDCA, DP-SCD and SEQDP-SCD.
pub struct DualSolver<'a> {
    data: &'a Dataset,
    loss: Loss,
    batch_size: usize,
    scale: f64,
    sequential: bool,
    noise_std: f64,
    state: DualState,
    sampler: BatchSampler,
    alpha_rng: ChaCha8Rng,
    v_rng: ChaCha8Rng,
    iterations: u64,
}

impl<'a> DualSolver<'a> {
    pub fn new(data: &'a Dataset, config: &SolverConfig) -> Result<Self> {
        if !config.algorithm.is_dual() {
            return Err(Error::InvalidConfig(format!(
                "{} is not a dual solver",
                config.algorithm
            )));
        }
        config.validate(data.n_examples(), data.n_features())?;
        let scale = config.scale_or_inf();
        let std = match config.algorithm.sensitivity_variant() {
            Some(variant) => noise_std(sensitivity(variant, scale, config.batch_size)?, config.sigma()),
            None => 0.0,
        };
        Ok(DualSolver {
            data,
            loss: config.loss,
            batch_size: config.batch_size,
            scale,
            sequential: config.algorithm == Algorithm::SeqDpScd,
            noise_std: std,
            state: DualState::zeros(data.n_examples(), data.n_features(), config.lambda),
            sampler: BatchSampler::new(data.n_examples(), config.batch_size, config.seed),
            alpha_rng: substream(config.seed, Stream::ModelNoise),
            v_rng: substream(config.seed, Stream::AuxNoise),
            iterations: 0,
        })
    }

    pub fn state(&self) -> &DualState {
        &self.state
    }

    pub fn into_state(self) -> DualState {
        self.state
    }

    /// Per-coordinate noise standard deviation applied to `α` and `v`.
    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn iterations_per_epoch(&self) -> usize {
        self.data.n_examples().div_ceil(self.batch_size)
    }

    /// `θ = v/(λN)` from the current state.
    pub fn theta(&self) -> Vec<f64> {
        self.state.theta()
    }

    /// One outer iteration; returns the noiseless update that was applied
    /// before noise was added.
    pub fn step(&mut self) -> BatchUpdate {
        let batch = self.sampler.next_batch();
        let update = if self.sequential {
            compute_sequential_update(self.data, self.loss, &self.state, &batch, self.batch_size, self.scale)
        } else {
            compute_batch_update(self.data, self.loss, &self.state, &batch, self.batch_size, self.scale)
        };
        update.apply(&mut self.state.alpha, &mut self.state.v);
        perturb_coordinates(
            &mut self.state.alpha,
            &update.indices,
            self.noise_std,
            &mut self.alpha_rng,
        );
        gaussian_perturb(&mut self.state.v, self.noise_std, 1.0, &mut self.v_rng);
        self.iterations += 1;
        update
    }

    fn epoch_record(&self, epoch: usize) -> Result<EpochRecord> {
        let theta = self.state.theta();
        let primal = primal_objective(&theta, self.data, self.state.lambda, self.loss)?;
        let dual = dual_objective_with_aux(
            &self.state.alpha,
            &self.state.v,
            self.data,
            self.state.lambda,
            self.loss,
        )?;
        Ok(EpochRecord {
            epoch,
            updates: self.iterations * self.batch_size as u64,
            primal,
            dual: Some(dual),
            gap: (self.noise_std == 0.0).then_some(primal + dual),
        })
    }

    fn snapshot(&self) -> Iterate {
        Iterate {
            model: self.state.alpha.clone(),
            aux: self.state.v.clone(),
        }
    }

    /// Runs `config.epochs` epochs and returns `θ` with the run record.
    pub fn run(mut self, config: &SolverConfig) -> Result<(Vec<f64>, RunRecord)> {
        let mut epochs = vec![self.epoch_record(0)?];
        let mut iterates = Vec::new();
        if config.record_iterates {
            iterates.push(self.snapshot());
        }
        let per_epoch = self.iterations_per_epoch();
        for e in 1..=config.epochs {
            for _ in 0..per_epoch {
                self.step();
            }
            epochs.push(self.epoch_record(e)?);
            if config.record_iterates {
                iterates.push(self.snapshot());
            }
        }
        let theta = self.state.theta();
        let record = RunRecord {
            algorithm: config.algorithm,
            seed: config.seed,
            sigma: config.sigma(),
            epochs,
            theta: theta.clone(),
            iterates,
        };
        Ok((theta, record))
    }
}

fn expect(config: &SolverConfig, algorithm: Algorithm) -> Result<()> {
    if config.algorithm == algorithm {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "configuration is for {}, not {algorithm}",
            config.algorithm
        )))
    }
}

/// Stochastic dual coordinate ascent: exact coordinate minimization, no
/// scaling and no noise.
pub fn train_sdca(data: &Dataset, config: &SolverConfig) -> Result<(Vec<f64>, RunRecord)> {
    expect(config, Algorithm::Sdca)?;
    DualSolver::new(data, config)?.run(config)
}

/// DP-SCD: independent scaled updates per mini-batch, Gaussian noise of
/// standard deviation `σ·√2·C` on the touched `α` coordinates and on all of
/// `v`. The model is read off `v` alone.
pub fn train_dpscd(data: &Dataset, config: &SolverConfig) -> Result<(Vec<f64>, RunRecord)> {
    expect(config, Algorithm::DpScd)?;
    DualSolver::new(data, config)?.run(config)
}

/// SEQDP-SCD: like DP-SCD but updates within a batch are applied one after
/// another, which raises the sensitivity to `2C·√(L(L+1))`.
pub fn train_seqdpscd(data: &Dataset, config: &SolverConfig) -> Result<(Vec<f64>, RunRecord)> {
    expect(config, Algorithm::SeqDpScd)?;
    DualSolver::new(data, config)?.run(config)
}

use rand_chacha::ChaCha8Rng;

use super::config::{Algorithm, SolverConfig};
use super::dual::{clip, BatchUpdate};
use super::record::{EpochRecord, Iterate, RunRecord};
use super::sampling::BatchSampler;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::glm::{primal_objective, solve_primal_subproblem, Loss, PrimalContext, PrimalState};
use crate::privacy::{gaussian_perturb, noise_std, perturb_coordinates, sensitivity, SensitivityVariant};
use crate::rng::{substream, Stream};

/// Independent primal coordinate update for the sampled features `coords`
/// against the snapshot `(θ, v = Xᵀθ)`. `indices` are features and
/// `delta_v` has one entry per example.
pub fn compute_primal_update(
    data: &Dataset,
    loss: Loss,
    state: &PrimalState,
    coords: &[usize],
    batch_size: usize,
    scale: f64,
) -> BatchUpdate {
    let mut indices = coords.to_vec();
    indices.sort_unstable();
    let zetas: Vec<f64> = indices
        .iter()
        .map(|&j| {
            let ctx = PrimalContext {
                theta_j: state.theta[j],
                row: data.feature_row(j),
                v: &state.v,
                labels: data.labels(),
                batch_size,
                lambda: state.lambda,
            };
            clip(solve_primal_subproblem(loss, &ctx), scale)
        })
        .collect();
    let mut delta_v = vec![0.0; state.v.len()];
    for (&j, &z) in indices.iter().zip(&zetas) {
        data.feature_row(j).axpy(z, &mut delta_v);
    }
    BatchUpdate {
        indices,
        zetas,
        delta_v,
    }
}

/// Stepping driver for PRIMALDP-SCD. Expects row-normalized data.
pub struct PrimalSolver<'a> {
    data: &'a Dataset,
    loss: Loss,
    batch_size: usize,
    scale: f64,
    noise_std: f64,
    state: PrimalState,
    sampler: BatchSampler,
    theta_rng: ChaCha8Rng,
    v_rng: ChaCha8Rng,
    iterations: u64,
}

impl<'a> PrimalSolver<'a> {
    pub fn new(data: &'a Dataset, config: &SolverConfig) -> Result<Self> {
        if config.algorithm != Algorithm::PrimalDpScd {
            return Err(Error::InvalidConfig(format!(
                "configuration is for {}, not {}",
                config.algorithm,
                Algorithm::PrimalDpScd
            )));
        }
        config.validate(data.n_examples(), data.n_features())?;
        let scale = config.scale_or_inf();
        let s_f = sensitivity(SensitivityVariant::Primal, scale, config.batch_size)?;
        // Build the feature-major index once, outside the timed loop.
        data.by_feature();
        Ok(PrimalSolver {
            data,
            loss: config.loss,
            batch_size: config.batch_size,
            scale,
            noise_std: noise_std(s_f, config.sigma()),
            state: PrimalState::zeros(data.n_examples(), data.n_features(), config.lambda),
            sampler: BatchSampler::new(data.n_features(), config.batch_size, config.seed),
            theta_rng: substream(config.seed, Stream::ModelNoise),
            v_rng: substream(config.seed, Stream::AuxNoise),
            iterations: 0,
        })
    }

    pub fn state(&self) -> &PrimalState {
        &self.state
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    pub fn iterations_per_epoch(&self) -> usize {
        self.data.n_features().div_ceil(self.batch_size)
    }

    pub fn step(&mut self) -> BatchUpdate {
        let coords = self.sampler.next_batch();
        let update = compute_primal_update(self.data, self.loss, &self.state, &coords, self.batch_size, self.scale);
        for (&j, &z) in update.indices.iter().zip(&update.zetas) {
            self.state.theta[j] += z;
        }
        for (a, d) in self.state.v.iter_mut().zip(&update.delta_v) {
            *a += d;
        }
        perturb_coordinates(
            &mut self.state.theta,
            &update.indices,
            self.noise_std,
            &mut self.theta_rng,
        );
        gaussian_perturb(&mut self.state.v, self.noise_std, 1.0, &mut self.v_rng);
        self.iterations += 1;
        update
    }

    fn epoch_record(&self, epoch: usize) -> Result<EpochRecord> {
        Ok(EpochRecord {
            epoch,
            updates: self.iterations * self.batch_size as u64,
            primal: primal_objective(&self.state.theta, self.data, self.state.lambda, self.loss)?,
            dual: None,
            gap: None,
        })
    }

    pub fn run(mut self, config: &SolverConfig) -> Result<(Vec<f64>, RunRecord)> {
        let snapshot = |s: &PrimalState| Iterate {
            model: s.theta.clone(),
            aux: s.v.clone(),
        };
        let mut epochs = vec![self.epoch_record(0)?];
        let mut iterates = Vec::new();
        if config.record_iterates {
            iterates.push(snapshot(&self.state));
        }
        let per_epoch = self.iterations_per_epoch();
        for e in 1..=config.epochs {
            for _ in 0..per_epoch {
                self.step();
            }
            epochs.push(self.epoch_record(e)?);
            if config.record_iterates {
                iterates.push(snapshot(&self.state));
            }
        }
        let theta = self.state.theta.clone();
        Ok((
            theta.clone(),
            RunRecord {
                algorithm: config.algorithm,
                seed: config.seed,
                sigma: config.sigma(),
                epochs,
                theta,
                iterates,
            },
        ))
    }
}

/// PRIMALDP-SCD: samples `L` features per iteration, solves each primal
/// coordinate subproblem against the iteration-start scores, scales, and adds
/// noise of standard deviation `σ·2C·√(L(L+1))` to the touched `θ`
/// coordinates and to all of `v`.
pub fn train_primal_dpscd(data: &Dataset, config: &SolverConfig) -> Result<(Vec<f64>, RunRecord)> {
    PrimalSolver::new(data, config)?.run(config)
}

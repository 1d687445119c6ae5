use rand_chacha::ChaCha8Rng;

use super::config::{Algorithm, SolverConfig};
use super::record::{EpochRecord, Iterate, RunRecord};
use super::sampling::BatchSampler;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::glm::{primal_objective, Loss};
use crate::privacy::gaussian_perturb;
use crate::rng::{substream, Stream};

/// `(1/|ξ|) Σ clip_C(ℓ'(x_iᵀθ) x_i) + λθ`, where `clip_C` rescales a
/// per-example term to norm at most `C`. Only the loss terms are clipped;
/// the regularizer is added afterwards.
pub fn clipped_gradient(theta: &[f64], batch: &[usize], data: &Dataset, lambda: f64, loss: Loss, c: f64) -> Vec<f64> {
    let mut g = vec![0.0; theta.len()];
    let inv = 1.0 / batch.len() as f64;
    for &i in batch {
        let x = data.example(i);
        let coef = loss.derivative(x.dot(theta), data.label(i));
        let norm = coef.abs() * x.sq_norm().sqrt();
        let coef = if norm > c { coef * (c / norm) } else { coef };
        x.axpy(inv * coef, &mut g);
    }
    for (gj, tj) in g.iter_mut().zip(theta) {
        *gj += lambda * tj;
    }
    g
}

/// Stepping driver shared by SGD and DP-SGD.
pub struct SgdSolver<'a> {
    data: &'a Dataset,
    loss: Loss,
    lambda: f64,
    learning_rate: f64,
    batch_size: usize,
    clip: f64,
    /// Standard deviation of the noise on the averaged gradient.
    noise_std: f64,
    theta: Vec<f64>,
    sampler: BatchSampler,
    noise_rng: ChaCha8Rng,
    steps: u64,
}

impl<'a> SgdSolver<'a> {
    pub fn new(data: &'a Dataset, config: &SolverConfig) -> Result<Self> {
        if !config.algorithm.uses_learning_rate() {
            return Err(Error::InvalidConfig(format!(
                "{} is not an SGD solver",
                config.algorithm
            )));
        }
        config.validate(data.n_examples(), data.n_features())?;
        let clip = config.scale_or_inf();
        let sigma = config.sigma();
        let std = if sigma == 0.0 {
            0.0
        } else {
            sigma * clip / config.batch_size as f64
        };
        Ok(SgdSolver {
            data,
            loss: config.loss,
            lambda: config.lambda,
            learning_rate: config.learning_rate.expect("validated"),
            batch_size: config.batch_size,
            clip,
            noise_std: std,
            theta: vec![0.0; data.n_features()],
            sampler: BatchSampler::new(data.n_examples(), config.batch_size, config.seed),
            noise_rng: substream(config.seed, Stream::ModelNoise),
            steps: 0,
        })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    pub fn steps_per_epoch(&self) -> usize {
        self.data.n_examples().div_ceil(self.batch_size)
    }

    /// One step; returns the sorted mini-batch it used.
    pub fn step(&mut self) -> Vec<usize> {
        let mut batch = self.sampler.next_batch();
        batch.sort_unstable();
        let mut g = clipped_gradient(&self.theta, &batch, self.data, self.lambda, self.loss, self.clip);
        gaussian_perturb(&mut g, self.noise_std, 1.0, &mut self.noise_rng);
        for (t, gj) in self.theta.iter_mut().zip(&g) {
            *t -= self.learning_rate * gj;
        }
        self.steps += 1;
        batch
    }

    fn epoch_record(&self, epoch: usize) -> Result<EpochRecord> {
        Ok(EpochRecord {
            epoch,
            updates: self.steps * self.batch_size as u64,
            primal: primal_objective(&self.theta, self.data, self.lambda, self.loss)?,
            dual: None,
            gap: None,
        })
    }

    pub fn run(mut self, config: &SolverConfig) -> Result<(Vec<f64>, RunRecord)> {
        let mut epochs = vec![self.epoch_record(0)?];
        let mut iterates = Vec::new();
        let snapshot = |t: &[f64]| Iterate {
            model: t.to_vec(),
            aux: Vec::new(),
        };
        if config.record_iterates {
            iterates.push(snapshot(&self.theta));
        }
        let per_epoch = self.steps_per_epoch();
        for e in 1..=config.epochs {
            for _ in 0..per_epoch {
                self.step();
            }
            epochs.push(self.epoch_record(e)?);
            if config.record_iterates {
                iterates.push(snapshot(&self.theta));
            }
        }
        let theta = self.theta.clone();
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

/// Mini-batch SGD on the primal objective.
pub fn train_sgd(data: &Dataset, config: &SolverConfig) -> Result<(Vec<f64>, RunRecord)> {
    if config.algorithm != Algorithm::Sgd {
        return Err(Error::InvalidConfig(format!(
            "configuration is for {}, not sgd",
            config.algorithm
        )));
    }
    SgdSolver::new(data, config)?.run(config)
}

/// DP-SGD: per-example loss gradients clipped to norm `C`, averaged, plus
/// Gaussian noise of standard deviation `σC/|ξ|` on every coordinate.
pub fn train_dpsgd(data: &Dataset, config: &SolverConfig) -> Result<(Vec<f64>, RunRecord)> {
    if config.algorithm != Algorithm::DpSgd {
        return Err(Error::InvalidConfig(format!(
            "configuration is for {}, not dpsgd",
            config.algorithm
        )));
    }
    SgdSolver::new(data, config)?.run(config)
}

//! Planted-model synthetic data for tests and desk-scale benchmarks.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use super::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{substream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    Regression,
    Classification,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Regression => "regression",
            Task::Classification => "classification",
        })
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "regression" => Ok(Task::Regression),
            "classification" => Ok(Task::Classification),
            other => Err(Error::InvalidArgument(format!("unknown task `{other}`"))),
        }
    }
}

/// Gaussian features, a planted `θ* ∼ N(0, I)`, and label noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n_examples: usize,
    pub n_features: usize,
    pub task: Task,
    /// Std of the Gaussian noise added to `x ᵀθ*` before labelling.
    pub label_noise: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(n_examples: usize, n_features: usize, task: Task, seed: u64) -> Self {
        SyntheticSpec {
            n_examples,
            n_features,
            task,
            label_noise: 0.1,
            seed,
        }
    }

    pub fn label_noise(mut self, std: f64) -> Self {
        self.label_noise = std;
        self
    }
}

/// Returns the dataset and the planted model. Classification labels are
/// `sign(xᵀθ* + noise)` in `{-1, +1}` with ties going to `+1`; regression
/// labels are `xᵀθ* + noise`.
pub fn generate(spec: &SyntheticSpec) -> (Dataset, Vec<f64>) {
    let mut rng = substream(spec.seed, Stream::Synthetic);
    let mut gauss = move || -> f64 { rng.sample(StandardNormal) };
    let theta: Vec<f64> = (0..spec.n_features).map(|_| gauss()).collect();
    let mut cols = Vec::with_capacity(spec.n_examples);
    let mut labels = Vec::with_capacity(spec.n_examples);
    for _ in 0..spec.n_examples {
        let x: Vec<f64> = (0..spec.n_features).map(|_| gauss()).collect();
        let z: f64 = x.iter().zip(&theta).map(|(a, b)| a * b).sum::<f64>() + spec.label_noise * gauss();
        labels.push(match spec.task {
            Task::Regression => z,
            Task::Classification => {
                if z >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
        });
        cols.push(x);
    }
    let data = Dataset::from_dense(spec.n_features, &cols, labels).expect("consistent shapes");
    (data, theta)
}

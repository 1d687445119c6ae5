//! Deterministic train/validation/test partitioning.
//!
//! Examples are shuffled with a seeded stream, then cut into consecutive
//! parts. Part sizes use round-half-up: `train = floor(N * f_train + 0.5)`,
//! `validation = min(floor(N * f_val + 0.5), N - train)`, and the remainder
//! goes to test.

use rand::seq::SliceRandom;

use super::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{substream, Stream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, validation_fraction: f64, seed: u64) -> Result<Self> {
        let spec = SplitSpec {
            train_fraction,
            validation_fraction,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |f: f64| (0.0..=1.0).contains(&f);
        if !ok(self.train_fraction)
            || !ok(self.validation_fraction)
            || self.train_fraction + self.validation_fraction > 1.0 + 1e-12
        {
            return Err(Error::InvalidArgument(format!(
                "split fractions must lie in [0, 1] and sum to at most 1 (got {} + {})",
                self.train_fraction, self.validation_fraction
            )));
        }
        Ok(())
    }

    pub fn sizes(&self, n: usize) -> (usize, usize, usize) {
        let round = |f: f64| ((n as f64 * f) + 0.5).floor() as usize;
        let train = round(self.train_fraction).min(n);
        let validation = round(self.validation_fraction).min(n - train);
        (train, validation, n - train - validation)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Splits {
    pub train: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
    pub indices: SplitIndices,
}

pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<SplitIndices> {
    spec.validate()?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut substream(spec.seed, Stream::Split));
    let (n_train, n_val, _) = spec.sizes(n);
    let test = order.split_off(n_train + n_val);
    let validation = order.split_off(n_train);
    Ok(SplitIndices {
        train: order,
        validation,
        test,
    })
}

pub fn split(data: &Dataset, spec: &SplitSpec) -> Result<Splits> {
    let indices = split_indices(data.n_examples(), spec)?;
    Ok(Splits {
        train: data.select(&indices.train),
        validation: data.select(&indices.validation),
        test: data.select(&indices.test),
        indices,
    })
}

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Which update rule a sensitivity bound covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SensitivityVariant {
    /// Independent mini-batch dual updates: `√2 · C`.
    Dual,
    /// Primal coordinate updates: `2C · √(L(L+1))`.
    Primal,
    /// Sequential (correlated) dual updates within a batch: `2C · √(L(L+1))`.
    Sequential,
}

impl fmt::Display for SensitivityVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SensitivityVariant::Dual => "dual",
            SensitivityVariant::Primal => "primal",
            SensitivityVariant::Sequential => "sequential",
        })
    }
}

impl FromStr for SensitivityVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dual" => Ok(SensitivityVariant::Dual),
            "primal" => Ok(SensitivityVariant::Primal),
            "sequential" => Ok(SensitivityVariant::Sequential),
            other => Err(Error::InvalidArgument(format!("unknown sensitivity variant `{other}`"))),
        }
    }
}

/// L2 sensitivity of one mini-batch update with scaling factor `c` and batch
/// size `l`.
pub fn sensitivity(variant: SensitivityVariant, c: f64, l: usize) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "scaling factor must be positive, got {c}"
        )));
    }
    if l == 0 {
        return Err(Error::InvalidArgument("batch size must be at least 1".into()));
    }
    let l = l as f64;
    Ok(match variant {
        SensitivityVariant::Dual => 2f64.sqrt() * c,
        SensitivityVariant::Primal | SensitivityVariant::Sequential => 2.0 * c * (l * (l + 1.0)).sqrt(),
    })
}

/// Per-component standard deviation `S_f · σ`, defined as zero whenever
/// either factor is zero (so an unbounded `S_f` with `σ = 0` is noiseless).
pub fn noise_std(sensitivity: f64, sigma: f64) -> f64 {
    if sensitivity == 0.0 || sigma == 0.0 {
        0.0
    } else {
        sensitivity * sigma
    }
}

/// Adds i.i.d. `N(0, (S_f σ)²)` noise to every component.
pub fn gaussian_perturb<R: Rng + ?Sized>(values: &mut [f64], sensitivity: f64, sigma: f64, rng: &mut R) {
    let std = noise_std(sensitivity, sigma);
    if std == 0.0 {
        return;
    }
    for x in values {
        *x += std * rng.sample::<f64, _>(StandardNormal);
    }
}

/// Adds `N(0, std²)` noise to the listed components only, in list order.
pub fn perturb_coordinates<R: Rng + ?Sized>(values: &mut [f64], indices: &[usize], std: f64, rng: &mut R) {
    if std == 0.0 {
        return;
    }
    for &i in indices {
        values[i] += std * rng.sample::<f64, _>(StandardNormal);
    }
}

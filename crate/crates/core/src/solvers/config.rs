use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::glm::Loss;
use crate::privacy::{PrivacyBudget, SensitivityVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Sdca,
    DpScd,
    SeqDpScd,
    PrimalDpScd,
    Sgd,
    DpSgd,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Sdca,
        Algorithm::DpScd,
        Algorithm::SeqDpScd,
        Algorithm::PrimalDpScd,
        Algorithm::Sgd,
        Algorithm::DpSgd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sdca => "sdca",
            Algorithm::DpScd => "dpscd",
            Algorithm::SeqDpScd => "seqdpscd",
            Algorithm::PrimalDpScd => "primaldpscd",
            Algorithm::Sgd => "sgd",
            Algorithm::DpSgd => "dpsgd",
        }
    }

    pub fn is_private(self) -> bool {
        !matches!(self, Algorithm::Sdca | Algorithm::Sgd)
    }

    /// Works on the dual `(α, v)` pair.
    pub fn is_dual(self) -> bool {
        matches!(self, Algorithm::Sdca | Algorithm::DpScd | Algorithm::SeqDpScd)
    }

    pub fn uses_scale(self) -> bool {
        matches!(
            self,
            Algorithm::DpScd | Algorithm::SeqDpScd | Algorithm::PrimalDpScd | Algorithm::DpSgd
        )
    }

    pub fn uses_learning_rate(self) -> bool {
        matches!(self, Algorithm::Sgd | Algorithm::DpSgd)
    }

    /// Sensitivity bound the coordinate-descent variants calibrate against.
    pub fn sensitivity_variant(self) -> Option<SensitivityVariant> {
        match self {
            Algorithm::DpScd => Some(SensitivityVariant::Dual),
            Algorithm::SeqDpScd => Some(SensitivityVariant::Sequential),
            Algorithm::PrimalDpScd => Some(SensitivityVariant::Primal),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == key || (key == "scd" && *a == Algorithm::Sdca))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm `{s}`")))
    }
}

/// Sampling ratio `q` and number of composed mechanisms `T` for a run.
///
/// Dual solvers and DP-SGD sample `L` of `N` examples per iteration and run
/// `ceil(N/L)` iterations per epoch. The primal solver touches every example
/// in each iteration (`q = 1`) and runs `ceil(M/L)` iterations per epoch.
pub fn accounting(
    algorithm: Algorithm,
    n_examples: usize,
    n_features: usize,
    batch_size: usize,
    epochs: usize,
) -> (f64, u64) {
    let units = if algorithm == Algorithm::PrimalDpScd {
        n_features
    } else {
        n_examples
    };
    let per_epoch = units.div_ceil(batch_size.max(1)) as u64;
    let q = if algorithm == Algorithm::PrimalDpScd || n_examples == 0 {
        1.0
    } else {
        batch_size as f64 / n_examples as f64
    };
    (q, epochs as u64 * per_epoch)
}

/// Hyperparameters of one training run.
///
/// Only the knobs an algorithm actually has may be set: the scaling factor
/// `C` for the private coordinate solvers and DP-SGD, the learning rate for
/// the SGD family, and a privacy budget for the private variants.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub loss: Loss,
    pub lambda: f64,
    pub epochs: usize,
    /// Mini-batch size: `L` for coordinate solvers, `|ξ|` for SGD.
    pub batch_size: usize,
    /// Scaling / clipping factor `C`; may be `f64::INFINITY`.
    pub scale: Option<f64>,
    pub learning_rate: Option<f64>,
    pub privacy: Option<PrivacyBudget>,
    pub seed: u64,
    /// Keep a snapshot of the model at every epoch boundary.
    pub record_iterates: bool,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, loss: Loss, lambda: f64) -> Self {
        SolverConfig {
            algorithm,
            loss,
            lambda,
            epochs: 1,
            batch_size: 1,
            scale: None,
            learning_rate: None,
            privacy: None,
            seed: 0,
            record_iterates: false,
        }
    }

    pub fn epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self
    }

    pub fn batch_size(mut self, batch_size: usize) -> Self {
        self.batch_size = batch_size;
        self
    }

    pub fn scale(mut self, c: f64) -> Self {
        self.scale = Some(c);
        self
    }

    pub fn learning_rate(mut self, eta: f64) -> Self {
        self.learning_rate = Some(eta);
        self
    }

    pub fn privacy(mut self, budget: PrivacyBudget) -> Self {
        self.privacy = Some(budget);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn record_iterates(mut self, on: bool) -> Self {
        self.record_iterates = on;
        self
    }

    /// `σ` of the attached budget, or zero.
    pub fn sigma(&self) -> f64 {
        self.privacy.map_or(0.0, |b| b.sigma)
    }

    /// `C`, with "unset" meaning no scaling at all.
    pub fn scale_or_inf(&self) -> f64 {
        self.scale.unwrap_or(f64::INFINITY)
    }

    /// Checks the configuration against a dataset of the given shape.
    pub fn validate(&self, n_examples: usize, n_features: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let alg = self.algorithm;
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be positive and finite, got {}", self.lambda));
        }
        let units = if alg == Algorithm::PrimalDpScd {
            n_features
        } else {
            n_examples
        };
        if units == 0 {
            return bad(format!("{alg} needs a nonempty dataset"));
        }
        if self.batch_size == 0 || self.batch_size > units {
            return bad(format!("batch size {} must lie in [1, {units}]", self.batch_size));
        }
        match (alg.uses_scale(), self.scale) {
            (true, None) => return bad(format!("{alg} requires a scaling factor C")),
            (false, Some(_)) => return bad(format!("{alg} has no scaling factor C")),
            (true, Some(c)) if !(c > 0.0) => return bad(format!("C must be positive, got {c}")),
            _ => {}
        }
        match (alg.uses_learning_rate(), self.learning_rate) {
            (true, None) => return bad(format!("{alg} requires a learning rate")),
            (false, Some(_)) => return bad(format!("{alg} has no learning rate")),
            (true, Some(eta)) if !(eta > 0.0 && eta.is_finite()) => {
                return bad(format!("learning rate must be positive, got {eta}"))
            }
            _ => {}
        }
        match (alg.is_private(), &self.privacy) {
            (true, None) => return Err(Error::UncalibratedBudget(format!("{alg} requires a privacy budget"))),
            (false, Some(_)) => return bad(format!("{alg} is not private; remove the budget")),
            (true, Some(b)) => self.check_budget(b, n_examples, n_features)?,
            _ => {}
        }
        Ok(())
    }

    fn check_budget(&self, b: &PrivacyBudget, n: usize, m: usize) -> Result<()> {
        if !(b.sigma >= 0.0 && b.sigma.is_finite()) {
            return Err(Error::UncalibratedBudget(format!("invalid sigma {}", b.sigma)));
        }
        if b.is_noiseless() {
            return Ok(());
        }
        if self.scale_or_inf().is_infinite() {
            return Err(Error::InvalidConfig("noisy runs need a finite scaling factor C".into()));
        }
        let (q, t) = accounting(self.algorithm, n, m, self.batch_size, self.epochs);
        if (b.sampling_ratio - q).abs() > 1e-12 * q || b.mechanisms != t {
            return Err(Error::UncalibratedBudget(format!(
                "budget was calibrated for q = {}, T = {} but this run has q = {q}, T = {t}",
                b.sampling_ratio, b.mechanisms
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("DP-SCD".parse::<Algorithm>().unwrap(), Algorithm::DpScd);
        assert_eq!("SeqDP-SCD".parse::<Algorithm>().unwrap(), Algorithm::SeqDpScd);
        assert!("adam".parse::<Algorithm>().is_err());
    }

    #[test]
    fn accounting_conventions() {
        assert_eq!(accounting(Algorithm::DpScd, 100, 7, 10, 3), (0.1, 30));
        assert_eq!(accounting(Algorithm::DpScd, 101, 7, 10, 2), (10.0 / 101.0, 22));
        assert_eq!(accounting(Algorithm::PrimalDpScd, 100, 7, 2, 5), (1.0, 20));
        assert_eq!(accounting(Algorithm::DpSgd, 50, 7, 50, 4), (1.0, 4));
    }

    #[test]
    fn rejects_irrelevant_hyperparameters() {
        let base = SolverConfig::new(Algorithm::Sdca, Loss::Ridge, 0.1);
        assert!(base.validate(10, 3).is_ok());
        assert!(base.clone().scale(1.0).validate(10, 3).is_err());
        assert!(base.clone().learning_rate(0.1).validate(10, 3).is_err());
        assert!(base.clone().batch_size(11).validate(10, 3).is_err());
        assert!(base.clone().batch_size(0).validate(10, 3).is_err());

        let sgd = SolverConfig::new(Algorithm::Sgd, Loss::Ridge, 0.1);
        assert!(sgd.validate(10, 3).is_err());
        assert!(sgd.clone().learning_rate(-1.0).validate(10, 3).is_err());
        assert!(sgd.clone().learning_rate(0.5).validate(10, 3).is_ok());

        let dp = SolverConfig::new(Algorithm::DpScd, Loss::Ridge, 0.1).scale(1.0);
        assert!(matches!(dp.validate(10, 3), Err(Error::UncalibratedBudget(_))));
        assert!(dp.clone().privacy(PrivacyBudget::noiseless()).validate(10, 3).is_ok());
        assert!(SolverConfig::new(Algorithm::DpScd, Loss::Ridge, 0.1)
            .privacy(PrivacyBudget::noiseless())
            .validate(10, 3)
            .is_err());
    }

    #[test]
    fn budget_must_match_the_run() {
        let (q, t) = accounting(Algorithm::DpScd, 100, 5, 10, 2);
        let b = PrivacyBudget::with_sigma(2.0, 1e-3, q, t).unwrap();
        let cfg = SolverConfig::new(Algorithm::DpScd, Loss::Ridge, 0.1)
            .scale(1.0)
            .batch_size(10)
            .epochs(2)
            .privacy(b);
        assert!(cfg.validate(100, 5).is_ok());
        assert!(matches!(
            cfg.clone().epochs(3).validate(100, 5),
            Err(Error::UncalibratedBudget(_))
        ));
        assert!(matches!(
            cfg.batch_size(20).validate(100, 5),
            Err(Error::UncalibratedBudget(_))
        ));
    }
}

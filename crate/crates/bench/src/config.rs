//! Experiment configuration and its flat `key = value` file format.
//!
//! ```text
//! # desk-scale ridge run
//! dataset    = synthetic
//! examples   = 2000
//! algorithms = sdca, dpscd, seqdpscd
//! epsilons   = 0.1, 0.5, 1, 2
//! scales     = 1e-8..1e4        # every power of ten in the range
//! ```
//!
//! Blank lines and `#` comments are ignored, list values are comma
//! separated, and every key may appear at most once. Keys that are not set
//! keep the defaults of [`ExperimentConfig::default`].

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dpscd::data::Task;
use dpscd::glm::Loss;
use dpscd::solvers::Algorithm;

use crate::error::{BenchError, Result};

/// Where the examples come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    /// Planted-model Gaussian data generated from the experiment seed.
    Synthetic {
        examples: usize,
        features: usize,
        label_noise: f64,
    },
    /// LIBSVM file(s). Without a test file the training file is split.
    Libsvm { train: PathBuf, test: Option<PathBuf> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub task: Task,
    pub loss: Loss,
    pub algorithms: Vec<Algorithm>,
    pub epsilons: Vec<f64>,
    pub delta: f64,
    pub lambda: f64,
    pub epochs: usize,
    /// Grid for the scaling / clipping factor `C`.
    pub scales: Vec<f64>,
    /// Grid for the SGD learning rate `η`.
    pub learning_rates: Vec<f64>,
    /// Grid for `L` (coordinate solvers) and `|ξ|` (SGD).
    pub batch_sizes: Vec<usize>,
    /// Number of seeds per configuration; run `s` uses `seed + s`.
    pub seeds: usize,
    /// Seeds data generation and splitting, and offsets the run seeds.
    pub seed: u64,
    /// Fraction of all examples used for training when there is no test file.
    pub train_fraction: f64,
    /// Fraction of the training examples held out for validation.
    pub validation_fraction: f64,
    /// `ε` at which `lc_sweep.csv` reports the whole hyperparameter grid.
    pub sweep_epsilon: f64,
    pub out_dir: PathBuf,
}

/// Powers of ten from `1e-8` to `1e4`.
pub fn decade_grid() -> Vec<f64> {
    powers_of_ten(-8, 4)
}

/// The batch sizes tried in the original experiments, including the
/// degenerate `0`, which is kept so grid cardinalities match and is recorded
/// as a failed point.
pub const PAPER_BATCH_SIZES: [usize; 12] = [0, 5, 10, 50, 100, 200, 500, 1000, 1250, 1500, 1750, 2000];

fn powers_of_ten(lo: i32, hi: i32) -> Vec<f64> {
    // Parsing the literal gives the correctly rounded value; powi does not.
    (lo..=hi).map(|k| format!("1e{k}").parse().unwrap()).collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: DatasetSource::Synthetic {
                examples: 2000,
                features: 10,
                label_noise: 0.1,
            },
            task: Task::Regression,
            loss: Loss::Ridge,
            algorithms: vec![
                Algorithm::Sdca,
                Algorithm::Sgd,
                Algorithm::DpScd,
                Algorithm::SeqDpScd,
                Algorithm::DpSgd,
            ],
            epsilons: vec![0.1, 0.5, 1.0, 2.0],
            delta: 1e-3,
            lambda: 1e-4,
            epochs: 10,
            scales: decade_grid(),
            learning_rates: decade_grid(),
            batch_sizes: PAPER_BATCH_SIZES.to_vec(),
            seeds: 10,
            seed: 0,
            train_fraction: 0.75,
            validation_fraction: 0.25,
            sweep_epsilon: 1.0,
            out_dir: PathBuf::from("bench-out"),
        }
    }
}

impl ExperimentConfig {
    /// Reads a config file. Relative dataset paths are resolved against the
    /// file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config: ExperimentConfig = text.parse()?;
        if let Some(dir) = path.parent() {
            config.resolve_paths(dir);
        }
        Ok(config)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        if let DatasetSource::Libsvm { train, test } = &mut self.dataset {
            for p in std::iter::once(train).chain(test.iter_mut()) {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
    }

    /// Sets one key as if it appeared in a config file. Used for CLI
    /// overrides; errors carry line 0.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let mut seen = HashSet::new();
        self.apply(key, value, 0, &mut seen)?;
        self.validate()
    }

    /// Seeds of the individual runs.
    pub fn run_seeds(&self) -> Vec<u64> {
        (0..self.seeds as u64).map(|s| self.seed.wrapping_add(s)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(BenchError::config(0, m));
        match &self.dataset {
            DatasetSource::Synthetic {
                examples,
                features,
                label_noise,
            } => {
                if *examples == 0 || *features == 0 {
                    return err("synthetic data needs examples > 0 and features > 0".into());
                }
                if !(label_noise.is_finite() && *label_noise >= 0.0) {
                    return err(format!("label_noise must be finite and >= 0, got {label_noise}"));
                }
            }
            DatasetSource::Libsvm { .. } => {}
        }
        if self.loss.is_classification() != (self.task == Task::Classification) {
            return err(format!("loss {} does not fit task {}", self.loss, self.task));
        }
        if self.algorithms.is_empty() {
            return err("algorithms must not be empty".into());
        }
        let mut seen = HashSet::new();
        for a in &self.algorithms {
            if !seen.insert(*a) {
                return err(format!("algorithm {a} listed twice"));
            }
        }
        if self.epsilons.is_empty() {
            return err("epsilons must not be empty".into());
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0)) {
            return err(format!("epsilons must be positive, got {e}"));
        }
        if !(self.sweep_epsilon > 0.0) {
            return err(format!("sweep_epsilon must be positive, got {}", self.sweep_epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return err(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return err(format!("lambda must be positive and finite, got {}", self.lambda));
        }
        if self.epochs == 0 {
            return err("epochs must be at least 1".into());
        }
        if self.seeds == 0 {
            return err("seeds must be at least 1".into());
        }
        for (name, grid) in [("scales", &self.scales), ("learning_rates", &self.learning_rates)] {
            if grid.is_empty() {
                return err(format!("{name} must not be empty"));
            }
            if let Some(x) = grid.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return err(format!("{name} must be positive and finite, got {x}"));
            }
        }
        if self.batch_sizes.is_empty() {
            return err("batch_sizes must not be empty".into());
        }
        let frac = |f: f64| f > 0.0 && f < 1.0;
        if !frac(self.train_fraction) || !frac(self.validation_fraction) {
            return err(format!(
                "train_fraction and validation_fraction must lie in (0, 1), got {} and {}",
                self.train_fraction, self.validation_fraction
            ));
        }
        Ok(())
    }

    fn apply(&mut self, key: &str, value: &str, line: usize, seen: &mut HashSet<String>) -> Result<()> {
        let bad = |m: String| BenchError::config(line, m);
        if !seen.insert(key.to_string()) {
            return Err(bad(format!("duplicate key `{key}`")));
        }
        match key {
            "dataset" => {
                self.dataset = if value == "synthetic" {
                    DatasetSource::Synthetic {
                        examples: 2000,
                        features: 10,
                        label_noise: 0.1,
                    }
                } else if value.is_empty() {
                    return Err(bad("dataset must be `synthetic` or a path".into()));
                } else {
                    DatasetSource::Libsvm {
                        train: PathBuf::from(value),
                        test: None,
                    }
                };
                self.check_dataset_order(seen, line)?;
            }
            "test_dataset" => match &mut self.dataset {
                DatasetSource::Libsvm { test, .. } if !value.is_empty() => *test = Some(PathBuf::from(value)),
                _ => return Err(bad("test_dataset needs a LIBSVM `dataset` set first".into())),
            },
            "examples" | "features" | "label_noise" => {
                let DatasetSource::Synthetic {
                    examples,
                    features,
                    label_noise,
                } = &mut self.dataset
                else {
                    return Err(bad(format!("`{key}` only applies to synthetic data")));
                };
                match key {
                    "examples" => *examples = scalar(value, line, key)?,
                    "features" => *features = scalar(value, line, key)?,
                    _ => *label_noise = scalar(value, line, key)?,
                }
            }
            "task" => self.task = scalar(value, line, key)?,
            "loss" => self.loss = scalar(value, line, key)?,
            "algorithms" => self.algorithms = list(value, line, key)?,
            "epsilons" => self.epsilons = list(value, line, key)?,
            "delta" => self.delta = scalar(value, line, key)?,
            "lambda" => self.lambda = scalar(value, line, key)?,
            "epochs" => self.epochs = scalar(value, line, key)?,
            "scales" => self.scales = float_grid(value, line, key)?,
            "learning_rates" => self.learning_rates = float_grid(value, line, key)?,
            "batch_sizes" => self.batch_sizes = list(value, line, key)?,
            "seeds" => self.seeds = scalar(value, line, key)?,
            "seed" => self.seed = scalar(value, line, key)?,
            "train_fraction" => self.train_fraction = scalar(value, line, key)?,
            "validation_fraction" => self.validation_fraction = scalar(value, line, key)?,
            "sweep_epsilon" => self.sweep_epsilon = scalar(value, line, key)?,
            "out_dir" => {
                if value.is_empty() {
                    return Err(bad("out_dir must not be empty".into()));
                }
                self.out_dir = PathBuf::from(value)
            }
            _ => return Err(bad(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Shape keys set before `dataset` would be silently reset by it.
    fn check_dataset_order(&self, seen: &HashSet<String>, line: usize) -> Result<()> {
        let shape = ["examples", "features", "label_noise"];
        if shape.iter().any(|k| seen.contains(*k)) {
            return Err(BenchError::config(
                line,
                "`dataset` must come before examples/features/label_noise",
            ));
        }
        Ok(())
    }
}

impl FromStr for ExperimentConfig {
    type Err = BenchError;

    fn from_str(text: &str) -> Result<Self> {
        let mut config = ExperimentConfig::default();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| BenchError::config(line, format!("expected `key = value`, got `{content}`")))?;
            config.apply(key.trim(), value.trim(), line, &mut seen)?;
        }
        // Defaults for the loss follow the task unless the file chose one.
        if !seen.contains("loss") && config.task == Task::Classification {
            config.loss = Loss::Logistic;
        }
        config.validate()?;
        Ok(config)
    }
}

fn scalar<T>(value: &str, line: usize, key: &str) -> Result<T>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| BenchError::config(line, format!("bad value `{value}` for `{key}`: {e}")))
}

fn list<T>(value: &str, line: usize, key: &str) -> Result<Vec<T>>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| scalar(s, line, key))
        .collect()
}

/// A comma list whose items are numbers or decade ranges `1e-3..1e2`.
fn float_grid(value: &str, line: usize, key: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once("..") {
            None => out.push(scalar(item, line, key)?),
            Some((lo, hi)) => {
                let lo = decade_exponent(scalar(lo, line, key)?, line, key)?;
                let hi = decade_exponent(scalar(hi, line, key)?, line, key)?;
                if lo > hi {
                    return Err(BenchError::config(line, format!("empty range `{item}` for `{key}`")));
                }
                out.extend(powers_of_ten(lo, hi));
            }
        }
    }
    Ok(out)
}

fn decade_exponent(x: f64, line: usize, key: &str) -> Result<i32> {
    let k = x.log10().round();
    if x > 0.0 && k.abs() <= 300.0 && (x / 10f64.powi(k as i32) - 1.0).abs() < 1e-12 {
        Ok(k as i32)
    } else {
        Err(BenchError::config(
            line,
            format!("range bounds for `{key}` must be powers of ten, got {x}"),
        ))
    }
}

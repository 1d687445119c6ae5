//! Loading, splitting and preprocessing an experiment's data.
//!
//! Every statistic (feature max-abs, label mean, class mapping) is fitted on
//! the training split only and then applied to validation and test.

use dpscd::data::{
    binarize_labels, center_labels, generate, normalize, normalize_with, read_libsvm, split, Dataset, LibsvmOptions,
    SplitSpec, SyntheticSpec, Task,
};

use crate::config::{DatasetSource, ExperimentConfig};
use crate::error::Result;

/// Normalized splits ready for training and evaluation.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub task: Task,
    /// Training split; regression labels are centered.
    pub train: Dataset,
    /// Validation split with labels on the original (uncentered) scale.
    pub validation: Dataset,
    /// Test split with labels on the original (uncentered) scale.
    pub test: Dataset,
    /// Added to `xᵀθ` to predict a regression label; zero for classification.
    pub intercept: f64,
    /// Training split rescaled for the primal solver.
    pub primal: PrimalView,
}

/// The training split divided by one scalar `s`, the largest feature-row
/// norm, so every row has norm at most one as the primal solver's
/// sensitivity bound requires.
///
/// Training on it with `λ / s²` and mapping the model back with `θ = θ'/s`
/// minimizes exactly the original objective, unlike per-row normalization,
/// which would reweight the regularizer feature by feature.
#[derive(Debug, Clone)]
pub struct PrimalView {
    pub data: Dataset,
    pub factor: f64,
}

impl PrimalView {
    pub fn new(train: &Dataset) -> dpscd::Result<Self> {
        let factor = train
            .by_feature()
            .columns()
            .map(|r| r.sq_norm().sqrt())
            .fold(0.0, f64::max);
        let factor = if factor > 0.0 { factor } else { 1.0 };
        let matrix = train.matrix().map_values(|_, _, x| x / factor);
        Ok(PrimalView {
            data: Dataset::new(matrix, train.labels().to_vec())?,
            factor,
        })
    }

    /// Regularization strength that makes the rescaled problem equivalent.
    pub fn lambda(&self, lambda: f64) -> f64 {
        lambda / (self.factor * self.factor)
    }

    /// Maps a model of the rescaled problem back to the original features.
    pub fn unscale(&self, theta: &[f64]) -> Vec<f64> {
        theta.iter().map(|t| t / self.factor).collect()
    }
}

pub fn prepare(config: &ExperimentConfig) -> Result<PreparedData> {
    let (train_all, test) = load(config)?;
    let inner = split(
        &train_all,
        &SplitSpec::new(
            1.0 - config.validation_fraction,
            config.validation_fraction,
            config.seed,
        )?,
    )?;
    let (mut train, mut validation, mut test) = (inner.train, inner.validation, test);

    if config.task == Task::Classification {
        let (t, mapping) = binarize_labels(&train)?;
        train = t;
        validation = mapping.apply(&validation)?;
        test = mapping.apply(&test)?;
    }

    let norm = normalize(&train);
    let train = norm.dataset;
    let validation = normalize_with(&validation, &norm.scaling)?.dataset;
    let test = normalize_with(&test, &norm.scaling)?.dataset;

    let (train, intercept) = match config.task {
        Task::Regression => center_labels(&train),
        Task::Classification => (train, 0.0),
    };
    let primal = PrimalView::new(&train)?;
    Ok(PreparedData {
        task: config.task,
        train,
        validation,
        test,
        intercept,
        primal,
    })
}

/// Returns the pool that train and validation are cut from, and the test set.
fn load(config: &ExperimentConfig) -> Result<(Dataset, Dataset)> {
    let seed = config.seed;
    let holdout = |data: &Dataset| -> Result<(Dataset, Dataset)> {
        let parts = split(data, &SplitSpec::new(config.train_fraction, 0.0, seed.wrapping_add(1))?)?;
        Ok((parts.train, parts.test))
    };
    match &config.dataset {
        DatasetSource::Synthetic {
            examples,
            features,
            label_noise,
        } => {
            let spec = SyntheticSpec::new(*examples, *features, config.task, seed).label_noise(*label_noise);
            holdout(&generate(&spec).0)
        }
        DatasetSource::Libsvm { train, test: None } => holdout(&read_libsvm(train, LibsvmOptions::default())?),
        DatasetSource::Libsvm {
            train,
            test: Some(test),
        } => {
            let a = read_libsvm(train, LibsvmOptions::default())?;
            let b = read_libsvm(test, LibsvmOptions::default())?;
            // The two files may disagree on the highest feature index seen.
            let m = a.n_features().max(b.n_features());
            let opts = LibsvmOptions { feature_count: Some(m) };
            let a = if a.n_features() < m {
                read_libsvm(train, opts)?
            } else {
                a
            };
            let b = if b.n_features() < m {
                read_libsvm(test, opts)?
            } else {
                b
            };
            Ok((a, b))
        }
    }
}

use std::sync::OnceLock;

use super::sparse::{CscMatrix, SparseVector};
use crate::error::{Error, Result};

/// Labelled examples: `M` features by `N` examples, one column per example.
///
/// Immutable after construction; the feature-major index used by the primal
/// solver is built lazily and cached.
#[derive(Debug, Clone)]
pub struct Dataset {
    examples: CscMatrix,
    labels: Vec<f64>,
    by_feature: OnceLock<CscMatrix>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.examples == other.examples && self.labels == other.labels
    }
}

impl Dataset {
    pub fn new(examples: CscMatrix, labels: Vec<f64>) -> Result<Self> {
        if examples.ncols() != labels.len() {
            return Err(Error::dims("labels", examples.ncols(), labels.len()));
        }
        Ok(Dataset {
            examples,
            labels,
            by_feature: OnceLock::new(),
        })
    }

    /// Convenience constructor from dense example vectors.
    pub fn from_dense(n_features: usize, examples: &[Vec<f64>], labels: Vec<f64>) -> Result<Self> {
        if let Some(bad) = examples.iter().find(|e| e.len() != n_features) {
            return Err(Error::dims("example length", n_features, bad.len()));
        }
        Dataset::new(CscMatrix::from_dense_columns(n_features, examples)?, labels)
    }

    pub fn empty(n_features: usize) -> Self {
        Dataset {
            examples: CscMatrix::empty(n_features),
            labels: Vec::new(),
            by_feature: OnceLock::new(),
        }
    }

    pub fn n_examples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.examples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn example(&self, i: usize) -> SparseVector<'_> {
        self.examples.column(i)
    }

    /// Row `j` of `X`: the value of feature `j` across all examples.
    pub fn feature_row(&self, j: usize) -> SparseVector<'_> {
        self.by_feature().column(j)
    }

    pub fn by_feature(&self) -> &CscMatrix {
        self.by_feature.get_or_init(|| self.examples.transpose())
    }

    pub fn matrix(&self) -> &CscMatrix {
        &self.examples
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// `X * alpha` (length `M`).
    pub fn mul(&self, alpha: &[f64]) -> Result<Vec<f64>> {
        if alpha.len() != self.n_examples() {
            return Err(Error::dims("dual vector", self.n_examples(), alpha.len()));
        }
        Ok(self.examples.mul_vec(alpha))
    }

    /// `X^T * theta` (length `N`): the linear scores of every example.
    pub fn scores(&self, theta: &[f64]) -> Result<Vec<f64>> {
        if theta.len() != self.n_features() {
            return Err(Error::dims("model vector", self.n_features(), theta.len()));
        }
        Ok(self.examples.columns().map(|c| c.dot(theta)).collect())
    }

    /// Subset of examples, in the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            examples: self.examples.select_columns(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            by_feature: OnceLock::new(),
        }
    }

    pub fn with_labels(&self, labels: Vec<f64>) -> Result<Dataset> {
        Dataset::new(self.examples.clone(), labels)
    }

    pub(crate) fn with_matrix(&self, examples: CscMatrix) -> Dataset {
        Dataset {
            examples,
            labels: self.labels.clone(),
            by_feature: OnceLock::new(),
        }
    }

    /// Copy with example `k` replaced by the zero vector: the removal
    /// adjacency used when reasoning about a single individual's influence.
    pub fn with_example_zeroed(&self, k: usize) -> Dataset {
        let cols = (0..self.n_examples()).map(|j| {
            if j == k {
                Vec::new()
            } else {
                self.example(j).iter().collect()
            }
        });
        let examples = CscMatrix::from_columns(self.n_features(), cols).expect("valid source columns");
        self.with_matrix(examples)
    }

    /// Squared column norms `||x_i||^2`.
    pub fn example_sq_norms(&self) -> Vec<f64> {
        self.examples.columns().map(|c| c.sq_norm()).collect()
    }
}

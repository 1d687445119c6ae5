//! Normalization and label conventions.
//!
//! The pipeline is: scale every feature row by its maximum absolute value
//! (statistics fitted on the training split), then scale every example to
//! unit L2 norm. Examples that end up all-zero are dropped with a warning.

use log::warn;

use super::dataset::Dataset;
use crate::error::{Error, Result};

/// Per-feature max-abs statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScaling {
    max_abs: Vec<f64>,
}

impl FeatureScaling {
    pub fn fit(data: &Dataset) -> Self {
        let mut max_abs = vec![0.0f64; data.n_features()];
        for col in data.matrix().columns() {
            for (j, x) in col.iter() {
                max_abs[j] = max_abs[j].max(x.abs());
            }
        }
        FeatureScaling { max_abs }
    }

    pub fn max_abs(&self) -> &[f64] {
        &self.max_abs
    }

    /// Divides each feature by its fitted max-abs; all-zero features are
    /// left unchanged.
    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        if data.n_features() != self.max_abs.len() {
            return Err(Error::dims("feature count", self.max_abs.len(), data.n_features()));
        }
        let m = data.matrix().map_values(|row, _, x| {
            let s = self.max_abs[row];
            if s > 0.0 {
                x / s
            } else {
                x
            }
        });
        Ok(data.with_matrix(m))
    }
}

/// Output of [`normalize`].
#[derive(Debug, Clone)]
pub struct Normalized {
    pub dataset: Dataset,
    pub scaling: FeatureScaling,
    /// Indices (into the input) of examples dropped for having zero norm.
    pub dropped: Vec<usize>,
}

/// Scales every example column to unit norm, dropping zero columns.
pub fn scale_to_unit_norm(data: &Dataset) -> (Dataset, Vec<usize>) {
    let norms: Vec<f64> = data.example_sq_norms().into_iter().map(f64::sqrt).collect();
    let (keep, dropped): (Vec<usize>, Vec<usize>) = (0..data.n_examples()).partition(|&i| norms[i] > 0.0);
    if !dropped.is_empty() {
        warn!(
            "dropping {} zero-norm example(s) during normalization: {:?}",
            dropped.len(),
            &dropped[..dropped.len().min(16)]
        );
    }
    let scaled = data.with_matrix(data.matrix().map_values(|_, col, x| x / norms[col]));
    let out = if dropped.is_empty() {
        scaled
    } else {
        scaled.select(&keep)
    };
    (out, dropped)
}

/// Fits max-abs scaling on `data` itself, then scales examples to unit norm.
pub fn normalize(data: &Dataset) -> Normalized {
    let scaling = FeatureScaling::fit(data);
    normalize_with(data, &scaling).expect("scaling fitted on the same data")
}

/// Applies previously fitted scaling (e.g. from the training split).
pub fn normalize_with(data: &Dataset, scaling: &FeatureScaling) -> Result<Normalized> {
    let scaled = scaling.apply(data)?;
    let (dataset, dropped) = scale_to_unit_norm(&scaled);
    Ok(Normalized {
        dataset,
        scaling: scaling.clone(),
        dropped,
    })
}

/// Per-feature L2 norms, used to put data in the row-normalized form the
/// primal solver's sensitivity bound assumes.
#[derive(Debug, Clone, PartialEq)]
pub struct RowScaling {
    norms: Vec<f64>,
}

impl RowScaling {
    pub fn fit(data: &Dataset) -> Self {
        let by_feature = data.by_feature();
        RowScaling {
            norms: by_feature.columns().map(|r| r.sq_norm().sqrt()).collect(),
        }
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        if data.n_features() != self.norms.len() {
            return Err(Error::dims("feature count", self.norms.len(), data.n_features()));
        }
        let m = data.matrix().map_values(|row, _, x| {
            let s = self.norms[row];
            if s > 0.0 {
                x / s
            } else {
                x
            }
        });
        Ok(data.with_matrix(m))
    }

    /// Maps a model trained on row-scaled data back to the original features.
    pub fn unscale_model(&self, theta: &[f64]) -> Vec<f64> {
        theta
            .iter()
            .zip(&self.norms)
            .map(|(&t, &s)| if s > 0.0 { t / s } else { 0.0 })
            .collect()
    }
}

pub fn normalize_rows(data: &Dataset) -> (Dataset, RowScaling) {
    let scaling = RowScaling::fit(data);
    let out = scaling.apply(data).expect("scaling fitted on the same data");
    (out, scaling)
}

/// Subtracts the label mean; returns the centered data and the offset to add
/// back at prediction time.
pub fn center_labels(data: &Dataset) -> (Dataset, f64) {
    if data.is_empty() {
        return (data.clone(), 0.0);
    }
    let offset = data.labels().iter().sum::<f64>() / data.n_examples() as f64;
    let labels = data.labels().iter().map(|y| y - offset).collect();
    (data.with_labels(labels).expect("same length"), offset)
}

/// Mapping from two raw class labels onto `{-1, +1}`.
///
/// The smaller raw label maps to `-1`. A dataset with a single class keeps
/// it on the side matching its sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelMapping {
    pub negative: Option<f64>,
    pub positive: Option<f64>,
}

impl LabelMapping {
    pub fn fit(labels: &[f64]) -> Result<Self> {
        let mut distinct: Vec<f64> = labels.to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        match distinct.as_slice() {
            [] => Ok(LabelMapping {
                negative: None,
                positive: None,
            }),
            [only] if *only > 0.0 => Ok(LabelMapping {
                negative: None,
                positive: Some(*only),
            }),
            [only] => Ok(LabelMapping {
                negative: Some(*only),
                positive: None,
            }),
            [lo, hi] => Ok(LabelMapping {
                negative: Some(*lo),
                positive: Some(*hi),
            }),
            more => Err(Error::InvalidArgument(format!(
                "classification needs two distinct labels, found {}: {:?}",
                more.len(),
                &more[..more.len().min(8)]
            ))),
        }
    }

    pub fn map(&self, raw: f64) -> Option<f64> {
        if Some(raw) == self.positive {
            Some(1.0)
        } else if Some(raw) == self.negative {
            Some(-1.0)
        } else {
            None
        }
    }

    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        let labels = data
            .labels()
            .iter()
            .map(|&y| {
                self.map(y)
                    .ok_or_else(|| Error::InvalidArgument(format!("label {y} not covered by mapping {self:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        data.with_labels(labels)
    }
}

pub fn binarize_labels(data: &Dataset) -> Result<(Dataset, LabelMapping)> {
    let mapping = LabelMapping::fit(data.labels())?;
    Ok((mapping.apply(data)?, mapping))
}

//! Dataset ingestion and preprocessing.
//!
//! Examples are stored column-major (one sparse column per example) since the
//! dual solvers touch whole examples; a feature-major index is built on first
//! use for the primal solver, which walks whole feature rows.

mod dataset;
mod libsvm;
mod preprocess;
mod sparse;
mod split;
pub mod synthetic;

pub use dataset::Dataset;
pub use libsvm::{
    parse_libsvm, parse_libsvm_str, parse_libsvm_with, read_libsvm, write_libsvm, LibsvmOptions, ParseError,
    ParseErrorKind,
};
pub use preprocess::{
    binarize_labels, center_labels, normalize, normalize_rows, normalize_with, scale_to_unit_norm, FeatureScaling,
    LabelMapping, Normalized, RowScaling,
};
pub use sparse::{CscMatrix, SparseVector};
pub use split::{split, split_indices, SplitIndices, SplitSpec, Splits};
pub use synthetic::{generate, SyntheticSpec, Task};

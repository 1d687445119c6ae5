//! LIBSVM text format.
//!
//! One example per line: `<label> <index>:<value> ...` with 1-based, strictly
//! increasing feature indices. Blank lines are skipped. Files starting with
//! the gzip magic bytes are decompressed transparently by [`read_libsvm`].

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;

use super::dataset::Dataset;
use super::sparse::CscMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    InvalidUtf8,
    InvalidLabel(String),
    MalformedToken(String),
    ZeroIndex,
    NonIncreasingIndex { previous: usize, found: usize },
    IndexExceedsFeatureCount { index: usize, feature_count: usize },
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::InvalidUtf8 => write!(f, "line is not valid UTF-8"),
            ParseErrorKind::InvalidLabel(tok) => write!(f, "non-numeric label `{tok}`"),
            ParseErrorKind::MalformedToken(tok) => {
                write!(f, "malformed token `{tok}` (expected <index>:<value>)")
            }
            ParseErrorKind::ZeroIndex => write!(f, "feature indices are 1-based; found 0"),
            ParseErrorKind::NonIncreasingIndex { previous, found } => {
                write!(f, "feature index {found} does not increase (previous index {previous})")
            }
            ParseErrorKind::IndexExceedsFeatureCount { index, feature_count } => write!(
                f,
                "feature index {index} exceeds the declared feature count {feature_count}"
            ),
        }
    }
}

/// Parse failure with the 1-based line number it occurred on.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("libsvm parse error on line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LibsvmOptions {
    /// Fixes `M` instead of inferring it from the largest index seen. Useful
    /// for test files that never touch the highest training feature.
    pub feature_count: Option<usize>,
}

pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<Dataset> {
    parse_libsvm_with(reader, LibsvmOptions::default())
}

pub fn parse_libsvm_str(text: &str) -> Result<Dataset> {
    parse_libsvm(text.as_bytes())
}

pub fn parse_libsvm_with<R: BufRead>(mut reader: R, options: LibsvmOptions) -> Result<Dataset> {
    let mut columns: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0usize;
    let mut buf = Vec::new();
    let mut line_no = 0usize;

    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let err = |kind| ParseError { line: line_no, kind };
        let line = std::str::from_utf8(&buf).map_err(|_| err(ParseErrorKind::InvalidUtf8))?;
        let mut tokens = line.split_ascii_whitespace();
        let Some(label_tok) = tokens.next() else {
            continue;
        };
        let label = parse_finite(label_tok).ok_or_else(|| err(ParseErrorKind::InvalidLabel(label_tok.to_string())))?;

        let mut entries = Vec::new();
        let mut previous = 0usize;
        for tok in tokens {
            let malformed = || err(ParseErrorKind::MalformedToken(tok.to_string()));
            let (idx, val) = tok.split_once(':').ok_or_else(malformed)?;
            let idx: usize = idx.parse().map_err(|_| malformed())?;
            let val = parse_finite(val).ok_or_else(malformed)?;
            if idx == 0 {
                return Err(err(ParseErrorKind::ZeroIndex).into());
            }
            if idx <= previous {
                return Err(err(ParseErrorKind::NonIncreasingIndex { previous, found: idx }).into());
            }
            if let Some(m) = options.feature_count {
                if idx > m {
                    return Err(err(ParseErrorKind::IndexExceedsFeatureCount {
                        index: idx,
                        feature_count: m,
                    })
                    .into());
                }
            }
            previous = idx;
            entries.push((idx - 1, val));
        }
        max_index = max_index.max(previous);
        columns.push(entries);
        labels.push(label);
    }

    let n_features = options.feature_count.unwrap_or(max_index);
    let examples = CscMatrix::from_columns(n_features, columns)?;
    Dataset::new(examples, labels)
}

fn parse_finite(tok: &str) -> Option<f64> {
    tok.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Reads a LIBSVM file, gunzipping it first when it carries the gzip magic.
pub fn read_libsvm(path: impl AsRef<Path>, options: LibsvmOptions) -> Result<Dataset> {
    let mut file = BufReader::new(File::open(path.as_ref())?);
    let gzipped = file.fill_buf()?.starts_with(&[0x1f, 0x8b]);
    if gzipped {
        let decoder: Box<dyn Read> = Box::new(MultiGzDecoder::new(file));
        parse_libsvm_with(BufReader::new(decoder), options)
    } else {
        parse_libsvm_with(file, options)
    }
}

/// Writes `data` back out. Values use Rust's shortest round-trip float
/// formatting, so parsing the output reproduces the same sparse triples.
pub fn write_libsvm<W: Write>(data: &Dataset, mut out: W) -> Result<()> {
    for i in 0..data.n_examples() {
        write!(out, "{}", data.label(i))?;
        for (j, x) in data.example(i).iter() {
            write!(out, " {}:{}", j + 1, x)?;
        }
        writeln!(out)?;
    }
    out.flush().map_err(Error::from)
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum BenchError {
    /// Malformed or inconsistent experiment configuration. `line` is 1-based
    /// and zero when the problem is not tied to a line (e.g. CLI overrides).
    #[error("config error{}: {message}", line_suffix(*.line))]
    Config { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error(transparent)]
    Core(#[from] dpscd::Error),

    #[error("every grid point failed for {algorithm} at epsilon {epsilon}: {}", .failures.join("; "))]
    AllPointsFailed {
        algorithm: String,
        epsilon: f64,
        failures: Vec<String>,
    },

    #[error("{0}")]
    Runtime(String),
}

fn line_suffix(line: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!(" on line {line}")
    }
}

impl BenchError {
    pub(crate) fn config(line: usize, message: impl Into<String>) -> Self {
        BenchError::Config {
            line,
            message: message.into(),
        }
    }

    /// Process exit code for the CLI: 2 for configuration problems, 3 for
    /// everything that goes wrong while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config { .. } => 2,
            _ => 3,
        }
    }
}

use super::config::Algorithm;

/// Metrics at one epoch boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Coordinate or example updates performed so far.
    pub updates: u64,
    /// `F(θ)` at the model the solver would emit now.
    pub primal: f64,
    /// `F*(α)` evaluated with the solver's own auxiliary vector (dual solvers).
    pub dual: Option<f64>,
    /// Duality gap; only reported for noiseless dual runs.
    pub gap: Option<f64>,
}

/// Model snapshot at an epoch boundary: `α` and `v` for dual solvers,
/// `θ` and `Xᵀθ` for the primal solver, `θ` alone for SGD.
#[derive(Debug, Clone, PartialEq)]
pub struct Iterate {
    pub model: Vec<f64>,
    pub aux: Vec<f64>,
}

/// Outcome of a training run. `epochs` has one entry per epoch plus the
/// initial point.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub sigma: f64,
    pub epochs: Vec<EpochRecord>,
    pub theta: Vec<f64>,
    /// Empty unless iterates were requested.
    pub iterates: Vec<Iterate>,
}

impl RunRecord {
    pub fn final_primal(&self) -> f64 {
        self.epochs.last().map_or(f64::NAN, |e| e.primal)
    }
}

//! One-dimensional coordinate subproblems.
//!
//! Dual: for a sampled example `x` with dual value `α`, mini-batch size `L`
//! and auxiliary vector `v`, the update `ζ` minimizes
//!
//! ```text
//! G(ζ) = (1/N) ℓ*(−(α + ζ)) + (1/(2λN²)) (‖v‖² + 2 xᵀv ζ + L ‖x‖² ζ²)
//! ```
//!
//! The factor `L` on the quadratic term makes the `L` independent updates of
//! a mini-batch safe to apply together.
//!
//! Primal: along coordinate `j` of `θ`, with scores `v = Xᵀθ`, the update
//! minimizes the second-order model
//!
//! ```text
//! g ζ + (h/2) ζ² + (λ/2)(θ_j + ζ)²,   g = (1/N) Σ ℓ'(v_i) X_ji,   h = (L/N) Σ ℓ''(v_i) X_ji²
//! ```
//!
//! which is exact for ridge when `L = 1`.

use super::loss::Loss;
use crate::data::SparseVector;

/// Curvature below which the logistic Newton step is abandoned.
const MIN_CURVATURE: f64 = 1e-12;

/// Everything the dual subproblem of one example depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateContext {
    /// Current (possibly noisy) dual value `α_j`.
    pub alpha: f64,
    pub label: f64,
    /// `x_jᵀv` against the iteration-start snapshot of `v`.
    pub xv: f64,
    /// `‖x_j‖²`.
    pub sq_norm: f64,
    pub batch_size: usize,
    pub lambda: f64,
    /// Number of training examples `N`.
    pub n: usize,
}

/// `G(ζ) − ‖v‖²/(2λN²)`: the subproblem objective without its constant term.
pub fn subproblem_objective(loss: Loss, ctx: &CoordinateContext, zeta: f64) -> f64 {
    let n = ctx.n as f64;
    let l = ctx.batch_size as f64;
    loss.conjugate(-(ctx.alpha + zeta), ctx.label) / n
        + (2.0 * ctx.xv * zeta + l * ctx.sq_norm * zeta * zeta) / (2.0 * ctx.lambda * n * n)
}

/// Minimizer of the dual subproblem (closed form for ridge and hinge, one
/// projected Newton step for logistic).
///
/// `α_j` is first projected onto the dual domain and `ζ` is measured from
/// the projected value. An example with no nonzero features is left
/// untouched (`ζ = 0`), which keeps the update a function of the example
/// alone when an adjacent dataset blanks it out.
pub fn solve_subproblem(loss: Loss, ctx: &CoordinateContext) -> f64 {
    if ctx.sq_norm == 0.0 {
        return 0.0;
    }
    let y = ctx.label;
    let a = loss.project_dual(ctx.alpha, y);
    let n = ctx.n as f64;
    let ln = ctx.lambda * n;
    let curv = ctx.batch_size as f64 * ctx.sq_norm;
    match loss {
        Loss::Ridge => (y - a - ctx.xv / ln) / (1.0 + curv / ln),
        Loss::Hinge => {
            let free = (ln * y - ctx.xv) / curv;
            let b = ((a + free) * y).clamp(0.0, 1.0);
            b * y - a
        }
        Loss::Logistic => {
            let projected = CoordinateContext { alpha: a, ..*ctx };
            let b = a * y;
            let d1 = y * (b / (1.0 - b)).ln() / n + ctx.xv / (ln * n);
            let d2 = 1.0 / (b * (1.0 - b) * n) + curv / (ln * n);
            if !(d2 >= MIN_CURVATURE) || !d1.is_finite() {
                return 0.0;
            }
            let tau = super::LOGISTIC_MARGIN;
            let b_new = ((a - d1 / d2) * y).clamp(tau, 1.0 - tau);
            let zeta = b_new * y - a;
            let g0 = subproblem_objective(loss, &projected, 0.0);
            let g1 = subproblem_objective(loss, &projected, zeta);
            if g1.is_finite() && g1 <= g0 {
                zeta
            } else {
                0.0
            }
        }
    }
}

/// Inputs of the primal coordinate subproblem for feature `j`.
#[derive(Debug, Clone, Copy)]
pub struct PrimalContext<'a> {
    pub theta_j: f64,
    /// Row `X[j, :]`: feature `j` across all examples.
    pub row: SparseVector<'a>,
    /// Scores `v = Xᵀθ` from the iteration-start snapshot.
    pub v: &'a [f64],
    pub labels: &'a [f64],
    pub batch_size: usize,
    pub lambda: f64,
}

fn primal_coefficients(loss: Loss, ctx: &PrimalContext<'_>) -> (f64, f64) {
    let n = ctx.labels.len() as f64;
    let (mut g, mut h) = (0.0, 0.0);
    for (i, x) in ctx.row.iter() {
        let (z, y) = (ctx.v[i], ctx.labels[i]);
        g += loss.derivative(z, y) * x;
        h += loss.second_derivative(z, y) * x * x;
    }
    (g / n, ctx.batch_size as f64 * h / n)
}

/// Value of the primal surrogate at `ζ`, up to a constant.
pub fn primal_surrogate(loss: Loss, ctx: &PrimalContext<'_>, zeta: f64) -> f64 {
    let (g, h) = primal_coefficients(loss, ctx);
    let t = ctx.theta_j + zeta;
    g * zeta + 0.5 * h * zeta * zeta + 0.5 * ctx.lambda * t * t
}

/// Minimizer of [`primal_surrogate`].
pub fn solve_primal_subproblem(loss: Loss, ctx: &PrimalContext<'_>) -> f64 {
    let (g, h) = primal_coefficients(loss, ctx);
    -(g + ctx.lambda * ctx.theta_j) / (h + ctx.lambda)
}

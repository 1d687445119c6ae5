//! Objectives, conjugates and coordinate subproblems for L2-regularized
//! generalized linear models.
//!
//! With `X` holding one example per column, the primal problem is
//!
//! ```text
//! F(θ)  = (1/N) Σ ℓ_i(x_iᵀθ) + (λ/2) ‖θ‖²
//! ```
//!
//! and its dual, written over `α ∈ R^N` with `v = Xα`, is
//!
//! ```text
//! F*(α) = (1/N) Σ ℓ*_i(−α_i) + ‖v‖² / (2λN²),     θ(α) = v / (λN).
//! ```
//!
//! The duality gap `F*(α) + F(θ(α))` is nonnegative for consistent states and
//! vanishes at the optimum.

mod loss;
mod objective;
mod subproblem;

pub use loss::{Loss, LOGISTIC_MARGIN};
pub use objective::{
    dual_objective, dual_objective_with_aux, duality_gap, per_example_gradient, primal_objective, sgd_gradient,
    theta_of_alpha, DualState, PrimalState,
};
pub use subproblem::{
    primal_surrogate, solve_primal_subproblem, solve_subproblem, subproblem_objective, CoordinateContext, PrimalContext,
};

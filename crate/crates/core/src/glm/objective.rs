use super::loss::Loss;
use crate::data::Dataset;
use crate::error::{Error, Result};

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")))
    }
}

/// Dual model `α` together with the auxiliary vector `v`.
///
/// In noiseless runs `v = Xα` holds up to rounding. Private solvers perturb
/// both halves independently, so `v` is then only consistent in expectation.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    pub alpha: Vec<f64>,
    pub v: Vec<f64>,
    pub lambda: f64,
}

impl DualState {
    pub fn zeros(n_examples: usize, n_features: usize, lambda: f64) -> Self {
        DualState {
            alpha: vec![0.0; n_examples],
            v: vec![0.0; n_features],
            lambda,
        }
    }

    /// State with `v` recomputed as `Xα`.
    pub fn consistent(alpha: Vec<f64>, data: &Dataset, lambda: f64) -> Result<Self> {
        let v = data.mul(&alpha)?;
        Ok(DualState { alpha, v, lambda })
    }

    /// `θ = v / (λN)`. Reads `v` only; never touches the data.
    pub fn theta(&self) -> Vec<f64> {
        let scale = 1.0 / (self.lambda * self.alpha.len() as f64);
        self.v.iter().map(|x| x * scale).collect()
    }

    /// `‖v − Xα‖`.
    pub fn consistency_residual(&self, data: &Dataset) -> Result<f64> {
        let xa = data.mul(&self.alpha)?;
        Ok(sq_norm(&sub(&self.v, &xa)).sqrt())
    }
}

/// Primal model `θ` with the cached scores `v = Xᵀθ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalState {
    pub theta: Vec<f64>,
    pub v: Vec<f64>,
    pub lambda: f64,
}

impl PrimalState {
    pub fn zeros(n_examples: usize, n_features: usize, lambda: f64) -> Self {
        PrimalState {
            theta: vec![0.0; n_features],
            v: vec![0.0; n_examples],
            lambda,
        }
    }

    pub fn consistent(theta: Vec<f64>, data: &Dataset, lambda: f64) -> Result<Self> {
        let v = data.scores(&theta)?;
        Ok(PrimalState { theta, v, lambda })
    }

    /// `‖v − Xᵀθ‖`.
    pub fn consistency_residual(&self, data: &Dataset) -> Result<f64> {
        let s = data.scores(&self.theta)?;
        Ok(sq_norm(&sub(&self.v, &s)).sqrt())
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `θ(α) = v / (λN)`, the primal point a dual state certifies.
pub fn theta_of_alpha(state: &DualState) -> Vec<f64> {
    state.theta()
}

/// `F(θ) = (1/N) Σ ℓ(x_iᵀθ) + (λ/2)‖θ‖²`. The loss term is zero when `N = 0`.
pub fn primal_objective(theta: &[f64], data: &Dataset, lambda: f64, loss: Loss) -> Result<f64> {
    let scores = data.scores(theta)?;
    let n = data.n_examples();
    let loss_sum: f64 = scores.iter().zip(data.labels()).map(|(&z, &y)| loss.value(z, y)).sum();
    let avg = if n == 0 { 0.0 } else { loss_sum / n as f64 };
    Ok(avg + 0.5 * lambda * sq_norm(theta))
}

/// `F*(α)` with `v = Xα` recomputed from the data.
pub fn dual_objective(alpha: &[f64], data: &Dataset, lambda: f64, loss: Loss) -> Result<f64> {
    let v = data.mul(alpha)?;
    dual_objective_with_aux(alpha, &v, data, lambda, loss)
}

/// `F*(α)` using the supplied auxiliary vector in place of `Xα`.
///
/// Returns `+∞` when some `α_i` lies outside the conjugate domain.
pub fn dual_objective_with_aux(alpha: &[f64], v: &[f64], data: &Dataset, lambda: f64, loss: Loss) -> Result<f64> {
    check_lambda(lambda)?;
    let n = data.n_examples();
    if alpha.len() != n {
        return Err(Error::dims("dual vector", n, alpha.len()));
    }
    if v.len() != data.n_features() {
        return Err(Error::dims("auxiliary vector", data.n_features(), v.len()));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let conj: f64 = alpha
        .iter()
        .zip(data.labels())
        .map(|(&a, &y)| loss.conjugate(-a, y))
        .sum();
    Ok(conj / nf + sq_norm(v) / (2.0 * lambda * nf * nf))
}

/// `Gap(α) = F*(α) + F(θ(α))`, evaluated from the state's own `v`.
pub fn duality_gap(state: &DualState, data: &Dataset, loss: Loss) -> Result<f64> {
    let dual = dual_objective_with_aux(&state.alpha, &state.v, data, state.lambda, loss)?;
    if dual.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let primal = primal_objective(&state.theta(), data, state.lambda, loss)?;
    Ok(dual + primal)
}

/// Per-example loss gradient `ℓ'(x_iᵀθ) x_i` (without the regularizer).
pub fn per_example_gradient(theta: &[f64], data: &Dataset, i: usize, loss: Loss) -> Result<Vec<f64>> {
    if theta.len() != data.n_features() {
        return Err(Error::dims("model vector", data.n_features(), theta.len()));
    }
    let x = data.example(i);
    let coef = loss.derivative(x.dot(theta), data.label(i));
    let mut g = vec![0.0; theta.len()];
    x.axpy(coef, &mut g);
    Ok(g)
}

/// Mini-batch gradient `(1/|ξ|) Σ_{i∈ξ} ℓ'(x_iᵀθ) x_i + λθ`.
pub fn sgd_gradient(theta: &[f64], batch: &[usize], data: &Dataset, lambda: f64, loss: Loss) -> Result<Vec<f64>> {
    if batch.is_empty() {
        return Err(Error::InvalidArgument("empty mini-batch".into()));
    }
    if theta.len() != data.n_features() {
        return Err(Error::dims("model vector", data.n_features(), theta.len()));
    }
    let mut g = vec![0.0; theta.len()];
    let inv = 1.0 / batch.len() as f64;
    for &i in batch {
        let x = data.example(i);
        x.axpy(inv * loss.derivative(x.dot(theta), data.label(i)), &mut g);
    }
    for (gj, tj) in g.iter_mut().zip(theta) {
        *gj += lambda * tj;
    }
    Ok(g)
}

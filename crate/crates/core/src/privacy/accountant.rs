//! Moments accountant for the subsampled Gaussian mechanism.
//!
//! With `μ0 = N(0, σ²)`, `μ1 = N(1, σ²)` and the mixture `μ = (1−q)μ0 + qμ1`,
//! the log moment of order `m` is `α(m) = log max(E1, E2)` where
//!
//! ```text
//! E1 = E_{z∼μ0}[(μ0(z)/μ(z))^m],   E2 = E_{z∼μ}[(μ(z)/μ0(z))^m].
//! ```
//!
//! Both are integrated numerically in log space. Composition over `T`
//! mechanisms and the tail bound give
//! `ε = min_m (T·α(m) + log(1/δ)) / m`.

use log::debug;

use super::quadrature::integrate;
use crate::error::{Error, Result};

/// Highest moment order tried. Orders up to 64 cap the reachable `ε` at
/// `log(1/δ)/64`, which already exceeds 0.1 for `δ = 1e-3`.
pub const MAX_MOMENT_ORDER: u32 = 256;
/// Lower end of the calibration bracket.
pub const SIGMA_MIN: f64 = 0.3;
/// Upper end of the calibration bracket.
pub const SIGMA_MAX: f64 = 1e4;

const TOL: f64 = 1e-12;
const TAIL: f64 = 10.0;
const TAIL_SIGMAS: f64 = 12.0;
const CALIBRATION_REL_TOL: f64 = 0.01;
const CALIBRATION_SIGMA_TOL: f64 = 1e-4;

fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `log ∫ exp(g(z)) dz` over `[a, b]`, shifting by the grid maximum of `g` so
/// the integrand peaks near 1.
fn log_integral(g: impl Fn(f64) -> f64, a: f64, b: f64, panel: f64) -> Option<f64> {
    let steps = (((b - a) / panel).ceil() as usize * 16).clamp(64, 200_000);
    let shift = (0..=steps)
        .map(|k| g(a + (b - a) * k as f64 / steps as f64))
        .fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return None;
    }
    let value = integrate(|z| (g(z) - shift).exp(), a, b, panel, TOL)?;
    if value > 0.0 {
        Some(shift + value.ln())
    } else {
        None
    }
}

/// `α(m)` for sampling ratio `q` and noise multiplier `σ`; `None` when the
/// integration does not produce a finite value.
pub fn log_moment(q: f64, sigma: f64, m: u32) -> Option<f64> {
    if !(sigma > 0.0) || !(q > 0.0 && q <= 1.0) || m == 0 {
        return None;
    }
    let s2 = sigma * sigma;
    let (ln_keep, ln_q) = ((1.0 - q).ln(), q.ln());
    let log_ratio = move |z: f64| log_add_exp(ln_keep, ln_q + (2.0 * z - 1.0) / (2.0 * s2));
    let log_mu0 = move |z: f64| -z * z / (2.0 * s2) - (sigma * (2.0 * std::f64::consts::PI).sqrt()).ln();
    let mf = m as f64;
    let a = -(TAIL_SIGMAS * sigma + TAIL);
    let b = mf + 1.0 + TAIL_SIGMAS * sigma + TAIL;
    let panel = 4.0 * sigma;
    let e1 = log_integral(|z| log_mu0(z) - mf * log_ratio(z), a, b, panel)?;
    let e2 = log_integral(|z| log_mu0(z) + (mf + 1.0) * log_ratio(z), a, b, panel)?;
    let alpha = e1.max(e2).max(0.0);
    alpha.is_finite().then_some(alpha)
}

fn validate(delta: f64, sigma: f64, q: f64, mechanisms: u64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(sigma > 0.0) || sigma.is_infinite() {
        return Err(Error::InvalidArgument(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "sampling ratio must lie in (0, 1], got {q}"
        )));
    }
    if mechanisms == 0 {
        return Err(Error::InvalidArgument("need at least one composed mechanism".into()));
    }
    Ok(())
}

/// `ε` after `mechanisms` compositions of the subsampled Gaussian mechanism.
///
/// Orders whose moment cannot be evaluated are skipped; if none survives the
/// call fails with [`Error::AccountantOutOfRange`].
///
/// `α(m)/m` is a Rényi divergence of order `m+1` and so nondecreasing in `m`.
/// Once `T·α(m)/m` alone reaches the best bound found, no higher order can
/// improve on it and the scan stops.
pub fn moments_accountant(delta: f64, sigma: f64, q: f64, mechanisms: u64) -> Result<f64> {
    validate(delta, sigma, q, mechanisms)?;
    let t = mechanisms as f64;
    let tail = (1.0 / delta).ln();
    let mut best = f64::INFINITY;
    for m in 1..=MAX_MOMENT_ORDER {
        let Some(alpha) = log_moment(q, sigma, m) else {
            continue;
        };
        let growth = t * alpha / m as f64;
        let eps = growth + tail / m as f64;
        if eps.is_finite() && eps < best {
            best = eps;
        }
        if growth >= best {
            break;
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::AccountantOutOfRange)
    }
}

fn eps_or_inf(delta: f64, sigma: f64, q: f64, mechanisms: u64) -> Result<f64> {
    match moments_accountant(delta, sigma, q, mechanisms) {
        Err(Error::AccountantOutOfRange) => Ok(f64::INFINITY),
        other => other,
    }
}

/// Smallest `σ` in `[SIGMA_MIN, SIGMA_MAX]` whose accounted `ε` does not
/// exceed the target, found by bisection on the monotone map `σ ↦ ε`.
///
/// The result satisfies `0.99·ε ≤ MA(σ) ≤ ε` (barring plateaus of the map)
/// and is resolved to about `1e-4` in `σ`.
pub fn calibrate_sigma(epsilon: f64, delta: f64, q: f64, mechanisms: u64) -> Result<f64> {
    if !(epsilon > 0.0) || epsilon.is_infinite() {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    let ma = |s: f64| eps_or_inf(delta, s, q, mechanisms);
    let (mut lo, mut hi) = (SIGMA_MIN, SIGMA_MAX);
    let (eps_lo, mut eps_hi) = (ma(lo)?, ma(hi)?);
    if epsilon < eps_hi || epsilon >= eps_lo {
        return Err(Error::CalibrationOutOfRange {
            target: epsilon,
            min_epsilon: eps_hi,
            max_epsilon: eps_lo,
            sigma_lo: SIGMA_MIN,
            sigma_hi: SIGMA_MAX,
        });
    }
    for _ in 0..200 {
        let close = eps_hi >= (1.0 - CALIBRATION_REL_TOL) * epsilon;
        if close && hi - lo <= CALIBRATION_SIGMA_TOL * hi.max(1.0) {
            break;
        }
        let mid = if hi / lo > 2.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        let e = ma(mid)?;
        if e <= epsilon {
            hi = mid;
            eps_hi = e;
        } else {
            lo = mid;
        }
    }
    debug!("calibrated sigma {hi} (epsilon {eps_hi} for target {epsilon}, q {q}, T {mechanisms})");
    Ok(hi)
}

/// A privacy budget together with the noise multiplier that meets it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyBudget {
    pub epsilon: f64,
    pub delta: f64,
    /// Fraction of the data one mechanism invocation touches.
    pub sampling_ratio: f64,
    /// Number of composed mechanisms (outer iterations).
    pub mechanisms: u64,
    pub sigma: f64,
}

impl PrivacyBudget {
    /// Calibrates `σ` for the target; `ε = ∞` gives `σ = 0`.
    pub fn calibrate(epsilon: f64, delta: f64, sampling_ratio: f64, mechanisms: u64) -> Result<Self> {
        let sigma = if epsilon == f64::INFINITY {
            0.0
        } else {
            calibrate_sigma(epsilon, delta, sampling_ratio, mechanisms)?
        };
        Ok(PrivacyBudget {
            epsilon,
            delta,
            sampling_ratio,
            mechanisms,
            sigma,
        })
    }

    /// Budget implied by a fixed `σ`; `σ = 0` spends `ε = ∞`.
    pub fn with_sigma(sigma: f64, delta: f64, sampling_ratio: f64, mechanisms: u64) -> Result<Self> {
        let epsilon = if sigma == 0.0 {
            f64::INFINITY
        } else {
            moments_accountant(delta, sigma, sampling_ratio, mechanisms)?
        };
        Ok(PrivacyBudget {
            epsilon,
            delta,
            sampling_ratio,
            mechanisms,
            sigma,
        })
    }

    /// No noise and no guarantee.
    pub fn noiseless() -> Self {
        PrivacyBudget {
            epsilon: f64::INFINITY,
            delta: 0.0,
            sampling_ratio: 1.0,
            mechanisms: 0,
            sigma: 0.0,
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.sigma == 0.0
    }
}

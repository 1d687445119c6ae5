use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Margin `τ` keeping projected logistic duals strictly inside `(0, 1)`.
pub const LOGISTIC_MARGIN: f64 = 1e-12;

/// Slack tolerated at the edge of a conjugate domain before returning `+∞`.
/// Absorbs the rounding of `α + (b·y − α)` when an update lands on a bound.
const DOMAIN_SLACK: f64 = 1e-12;

/// The three supported losses. Classification losses expect labels in
/// `{-1, +1}`.
///
/// | loss     | `ℓ(z)`              | `ℓ*(u)`                     | domain of `ℓ*`   |
/// |----------|---------------------|-----------------------------|------------------|
/// | ridge    | `(z − y)² / 2`      | `u²/2 + u·y`                | all `u`          |
/// | logistic | `log(1 + e^{−yz})`  | `b log b + (1−b) log(1−b)`, `b = −uy` | `b ∈ [0, 1]` |
/// | hinge    | `max(0, 1 − yz)`    | `u·y`                       | `uy ∈ [−1, 0]`   |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Loss {
    Ridge,
    Logistic,
    Hinge,
}

impl Loss {
    pub const ALL: [Loss; 3] = [Loss::Ridge, Loss::Logistic, Loss::Hinge];

    pub fn value(self, z: f64, y: f64) -> f64 {
        match self {
            Loss::Ridge => 0.5 * (z - y) * (z - y),
            Loss::Logistic => softplus(-y * z),
            Loss::Hinge => (1.0 - y * z).max(0.0),
        }
    }

    /// `dℓ/dz`. For the hinge this is the subgradient that is zero at the kink.
    pub fn derivative(self, z: f64, y: f64) -> f64 {
        match self {
            Loss::Ridge => z - y,
            Loss::Logistic => -y * sigmoid(-y * z),
            Loss::Hinge => {
                if y * z < 1.0 {
                    -y
                } else {
                    0.0
                }
            }
        }
    }

    /// `d²ℓ/dz²`; zero for the hinge, which has no curvature to exploit.
    pub fn second_derivative(self, z: f64, y: f64) -> f64 {
        match self {
            Loss::Ridge => 1.0,
            Loss::Logistic => {
                let s = sigmoid(y * z);
                s * (1.0 - s) * y * y
            }
            Loss::Hinge => 0.0,
        }
    }

    /// Convex conjugate `ℓ*(u)`; `+∞` outside its domain.
    pub fn conjugate(self, u: f64, y: f64) -> f64 {
        match self {
            Loss::Ridge => 0.5 * u * u + u * y,
            Loss::Logistic => match unit_interval(-u * y) {
                Some(b) => neg_entropy(b),
                None => f64::INFINITY,
            },
            Loss::Hinge => match unit_interval(-u * y) {
                Some(b) => -b,
                None => f64::INFINITY,
            },
        }
    }

    /// Inverse smoothness `μ`: `ℓ` is `1/μ`-smooth and `ℓ*` is `μ`-strongly
    /// convex. `None` for the non-smooth hinge.
    pub fn smoothness_inverse(self) -> Option<f64> {
        match self {
            Loss::Ridge => Some(1.0),
            Loss::Logistic => Some(4.0),
            Loss::Hinge => None,
        }
    }

    pub fn is_classification(self) -> bool {
        !matches!(self, Loss::Ridge)
    }

    /// Nearest point of the dual domain `{α : ℓ*(−α) < ∞}`.
    pub fn project_dual(self, alpha: f64, y: f64) -> f64 {
        match self {
            Loss::Ridge => alpha,
            Loss::Hinge => (alpha * y).clamp(0.0, 1.0) * y,
            Loss::Logistic => (alpha * y).clamp(LOGISTIC_MARGIN, 1.0 - LOGISTIC_MARGIN) * y,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Loss::Ridge => "ridge",
            Loss::Logistic => "logistic",
            Loss::Hinge => "hinge",
        }
    }
}

impl fmt::Display for Loss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Loss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ridge" | "squared" => Ok(Loss::Ridge),
            "logistic" => Ok(Loss::Logistic),
            "hinge" | "svm" => Ok(Loss::Hinge),
            other => Err(Error::InvalidArgument(format!("unknown loss `{other}`"))),
        }
    }
}

fn unit_interval(b: f64) -> Option<f64> {
    if (-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&b) {
        Some(b.clamp(0.0, 1.0))
    } else {
        None
    }
}

/// `b log b + (1 − b) log(1 − b)` with `0 log 0 = 0`.
pub(crate) fn neg_entropy(b: f64) -> f64 {
    xlogx(b) + xlogx(1.0 - b)
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

pub(crate) fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

pub(crate) fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

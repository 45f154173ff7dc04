//! Named channels and one-parameter channel families.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::QubitChannel;
use crate::error::{check_range, Result};

/// `t = (0, 0, p)`, `λ = (√(1−p), √(1−p), 1−p)`.
pub fn amplitude_damping(p: f64) -> Result<QubitChannel> {
    check_range("p", p, 0.0, 1.0, "[0, 1]")?;
    let a = (1.0 - p).sqrt();
    Ok(QubitChannel::canonical([0.0, 0.0, p], [a, a, 1.0 - p]))
}

/// Boundary of the extreme points of the qubit channel set:
/// `t = (0, 0, sin u sin v)`, `λ = (cos u, cos v, cos u cos v)`.
pub fn extremal_channel(u: f64, v: f64) -> Result<QubitChannel> {
    check_range("u", u, 0.0, 2.0 * PI, "[0, 2π)")?;
    check_range("v", v, 0.0, PI, "[0, π)")?;
    let (su, cu) = u.sin_cos();
    let (sv, cv) = v.sin_cos();
    Ok(QubitChannel::canonical([0.0, 0.0, su * sv], [cu, cv, cu * cv]))
}

/// `t = (0, 0, 1−q)`, `λ = (−q, q, −q)`; its Choi state is a mixture of a
/// singlet (weight q) and `|0⟩⟨0| ⊗ I/2`-type noise.
pub fn genuine_hidden_family(q: f64) -> Result<QubitChannel> {
    check_range("q", q, 0.0, 1.0, "[0, 1]")?;
    Ok(QubitChannel::canonical([0.0, 0.0, 1.0 - q], [-q, q, -q]))
}

/// Saturates `λ₁² + λ₂² = 1` yet lets a partially entangled input violate CHSH.
pub fn saturating_counterexample() -> QubitChannel {
    QubitChannel::canonical([-0.12, 0.047, -0.210], [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.5])
}

/// Breaks CHSH for the maximally entangled input but not for the
/// Schmidt state with λ = 0.45.
pub fn schmidt_counterexample() -> QubitChannel {
    QubitChannel::canonical([0.28, 0.01, -0.1], [0.7, 0.71, 0.7])
}

/// Non-unital channel whose Choi state has C-spectrum ratio ≈ 0.887.
pub fn nonunital_strong_breaker() -> QubitChannel {
    QubitChannel::canonical([0.0, 0.0, 0.29], [FRAC_1_SQRT_2, 0.1f64.sqrt(), 0.5])
}

/// One-parameter families accepted by sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Parameter `p`.
    AmpDamp,
    /// Parameter `u` at fixed `v`.
    Extremal,
    /// Parameter `q`.
    QFamily,
}

impl Family {
    pub fn channel(self, param: f64, v: f64) -> Result<QubitChannel> {
        match self {
            Family::AmpDamp => amplitude_damping(param),
            Family::Extremal => extremal_channel(param, v),
            Family::QFamily => genuine_hidden_family(param),
        }
    }

    pub fn parameter_name(self) -> &'static str {
        match self {
            Family::AmpDamp => "p",
            Family::Extremal => "u",
            Family::QFamily => "q",
        }
    }

    /// Inclusive parameter range swept by default.
    pub fn default_range(self) -> (f64, f64) {
        match self {
            Family::AmpDamp | Family::QFamily => (0.0, 1.0),
            Family::Extremal => (0.0, PI),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::AmpDamp => "ampdamp",
            Family::Extremal => "extremal",
            Family::QFamily => "qfamily",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ampdamp" | "amplitude-damping" => Ok(Family::AmpDamp),
            "extremal" => Ok(Family::Extremal),
            "qfamily" | "q-family" => Ok(Family::QFamily),
            _ => Err(format!("unknown family '{s}' (expected ampdamp, extremal or qfamily)")),
        }
    }
}

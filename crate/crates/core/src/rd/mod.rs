//! Rate-distortion tools. All logarithms are base 2 and all rates are in
//! bits.

mod ba;
mod conditional;
mod exponent;
mod tail;
mod typicality;

pub use ba::{blahut_arimoto_rd, rd_curve, write_rd_csv, DistortionMatrix, RdCurvePoint, RdSolution};
pub use conditional::{
    conditional_dtilted, conditional_rd, dtilted_information, ConditionalDtilted, ConditionalRd,
    JointDistribution,
};
pub use exponent::{binary_exponent_check, ExponentCheck};
pub use tail::{
    admissible, tail_functionals, AdmissibilityReport, ConditionTrace, CountableDistribution,
    FiniteDistribution, Geometric, TailFunctionals, Zeta,
};
pub use typicality::{
    gaussian_joint_typical, gaussian_weak_typical, strong_typical, unified_typical, weak_typical,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tol;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RdError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("`{name}` = {value} is out of range: {reason}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("distortion {requested} is below the minimum achievable {d_min}")]
    BelowMinimum { requested: f64, d_min: f64 },
    #[error("Blahut-Arimoto did not converge in {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("distribution provides no certified tail bound")]
    NoTailCertificate,
}

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, RdError> {
        if probs.is_empty() {
            return Err(RdError::InvalidDistribution("empty alphabet".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(RdError::InvalidDistribution(format!("entry {p} is not a probability")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > tol::PROBABILITY_SUM {
            return Err(RdError::InvalidDistribution(format!("entries sum to {sum}")));
        }
        Ok(DiscreteDistribution { probs })
    }

    pub fn uniform(size: usize) -> Self {
        DiscreteDistribution {
            probs: vec![1.0 / size as f64; size],
        }
    }

    pub fn bernoulli(p: f64) -> Result<Self, RdError> {
        check_unit("p", p)?;
        Ok(DiscreteDistribution {
            probs: vec![1.0 - p, p],
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entropy(&self) -> f64 {
        entropy(&self.probs)
    }
}

/// Σ −p log₂ p with 0 log 0 = 0.
pub fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

fn check_unit(name: &'static str, x: f64) -> Result<(), RdError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(RdError::OutOfRange {
            name,
            value: x,
            reason: "must lie in [0, 1]",
        });
    }
    Ok(())
}

/// H₂(p).
pub fn binary_entropy(p: f64) -> Result<f64, RdError> {
    check_unit("p", p)?;
    Ok(entropy(&[p, 1.0 - p]))
}

/// H₂ for arguments already known to be probabilities.
pub(crate) fn h2(p: f64) -> f64 {
    entropy(&[p, 1.0 - p])
}

/// x⋆y = (1−x)y + x(1−y).
pub fn binary_convolve(x: f64, y: f64) -> Result<f64, RdError> {
    check_unit("x", x)?;
    check_unit("y", y)?;
    Ok(star(x, y))
}

pub(crate) fn star(x: f64, y: f64) -> f64 {
    (1.0 - x) * y + x * (1.0 - y)
}

/// max(0, ½ log₂ x), with ½ log₂ ∞ = ∞ and ½ log⁺ 0 = 0.
pub fn half_log_plus(x: f64) -> f64 {
    if x.is_nan() || x <= 1.0 {
        0.0
    } else {
        0.5 * x.log2()
    }
}

fn check_positive(name: &'static str, x: f64) -> Result<(), RdError> {
    if !(x > 0.0) {
        return Err(RdError::OutOfRange {
            name,
            value: x,
            reason: "must be > 0",
        });
    }
    Ok(())
}

/// ½ log⁺(λ/D).
pub fn gaussian_rd(variance: f64, d: f64) -> Result<f64, RdError> {
    check_positive("variance", variance)?;
    check_positive("D", d)?;
    Ok(half_log_plus(variance / d))
}

/// ½ log⁺(λN₀/(D(P'+N₀))): the rate needed to describe S within D given
/// the wiretapper's observation of the linear scheme. Zero when N₀ = 0.
pub fn gaussian_conditional_rd(variance: f64, power: f64, noise: f64, d: f64) -> Result<f64, RdError> {
    check_positive("variance", variance)?;
    check_positive("D", d)?;
    if power < 0.0 || noise < 0.0 {
        return Err(RdError::OutOfRange {
            name: "power/noise",
            value: power.min(noise),
            reason: "must be >= 0",
        });
    }
    Ok(half_log_plus(crate::models::linear_mmse(variance, power, noise) / d))
}

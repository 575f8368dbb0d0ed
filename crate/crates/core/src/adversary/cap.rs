use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;

use super::AttackError;
use crate::models::linear_mmse;
use crate::rd::half_log_plus;

/// `ln I_x(a, b)`, the log of the regularized incomplete beta function.
///
/// Stays accurate far below the f64 underflow threshold, which the covering
/// probabilities at n in the thousands need.
pub fn ln_beta_inc(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "shape parameters must be positive");
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if x >= 1.0 {
        return 0.0;
    }
    let ln_front = |a: f64, b: f64, x: f64| a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front(a, b, x) - a.ln() + continued_fraction(a, b, x).ln()
    } else {
        let other = (ln_front(b, a, 1.0 - x) - b.ln() + continued_fraction(b, a, 1.0 - x).ln()).exp();
        (-other).ln_1p()
    }
}

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=100_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// `ln` of the fraction of the unit sphere in ℝⁿ within angle θ of a fixed
/// direction, given `cos θ ∈ [−1, 1]`.
pub(crate) fn ln_cap_fraction(n: usize, cos: f64) -> f64 {
    if cos >= 1.0 {
        return f64::NEG_INFINITY;
    }
    if cos <= -1.0 {
        return 0.0;
    }
    let a = (n as f64 - 1.0) / 2.0;
    let sin2 = (1.0 - cos) * (1.0 + cos);
    let ln_small = ln_beta_inc(a, 0.5, sin2) - std::f64::consts::LN_2;
    if cos >= 0.0 {
        ln_small
    } else {
        (-ln_small.exp()).ln_1p()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapRatio {
    /// Ω(θ)/Ω(π) = ½ I_{sin²θ}((n−1)/2, ½).
    pub exact: f64,
    /// sin^{n−1}θ / (√(2πn) cos θ); infinite at θ = π/2.
    pub asymptotic: f64,
}

impl CapRatio {
    pub fn relative_gap(&self) -> f64 {
        (self.exact - self.asymptotic).abs() / self.exact
    }
}

/// Area of a spherical cap of half-angle θ relative to the whole sphere in
/// ℝⁿ, with the large-n approximation.
pub fn spherical_cap_ratio(n: usize, theta: f64) -> Result<CapRatio, AttackError> {
    if n < 2 {
        return Err(AttackError::OutOfRange {
            name: "n",
            value: n as f64,
            reason: "the sphere needs n >= 2",
        });
    }
    if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
        return Err(AttackError::OutOfRange {
            name: "theta",
            value: theta,
            reason: "half-angle must lie in (0, pi/2]",
        });
    }
    let cos = if theta == std::f64::consts::FRAC_PI_2 { 0.0 } else { theta.cos() };
    let exact = ln_cap_fraction(n, cos).exp();
    let asymptotic = if cos == 0.0 {
        f64::INFINITY
    } else {
        ((n as f64 - 1.0) * theta.sin().ln()).exp() / ((2.0 * std::f64::consts::PI * n as f64).sqrt() * cos)
    };
    Ok(CapRatio { exact, asymptotic })
}

/// Exponents of the ball counts needed to cover the wiretapper's
/// uncertainty with balls of radius √(nD₀).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveringEstimate {
    /// R_K + ½log⁺(λN₀/(D₀(P'+N₀))): one covering per key.
    pub keyed: f64,
    /// ½log⁺(λ/D₀): covering the source sphere outright.
    pub keyless: f64,
}

pub fn covering_count_estimate(
    variance: f64,
    power: f64,
    n0: f64,
    d0: f64,
    key_rate: f64,
) -> Result<CoveringEstimate, AttackError> {
    if !(d0 > 0.0) {
        return Err(AttackError::OutOfRange {
            name: "D0",
            value: d0,
            reason: "ball radius must be positive",
        });
    }
    let residual = linear_mmse(variance, power, n0);
    Ok(CoveringEstimate {
        keyed: key_rate + half_log_plus(residual / d0),
        keyless: half_log_plus(variance / d0),
    })
}

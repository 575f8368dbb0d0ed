use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{h2, RdError};
use crate::stats::log2_biguint;

/// Exact check of P[d(Sⁿ, 0ⁿ) ≤ D] ≤ 2^{−n(R(D) − c·log₂(n+1)/n)} for a
/// uniform binary source under Hamming distortion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentCheck {
    pub n: u64,
    pub d: f64,
    /// −(1/n) log₂ P[weight ≤ nD].
    pub exponent: f64,
    /// 1 − H₂(D) − c·log₂(n+1)/n.
    pub bound: f64,
    pub holds: bool,
}

pub fn binary_exponent_check(n: u64, d: f64, c: f64) -> Result<ExponentCheck, RdError> {
    if !(0.0..=0.5).contains(&d) || n == 0 {
        return Err(RdError::OutOfRange {
            name: "D",
            value: d,
            reason: "need 0 <= D <= 1/2 and n >= 1",
        });
    }
    let kmax = (n as f64 * d + 1e-9).floor() as u64;
    let mut binom = BigUint::from(1u32);
    let mut total = BigUint::from(1u32);
    for k in 1..=kmax {
        binom = binom * (n - k + 1) / k;
        total += &binom;
    }
    let log2_total = log2_biguint(&total);
    let exponent = (n as f64 - log2_total) / n as f64;
    let bound = 1.0 - h2(d) - c * ((n + 1) as f64).log2() / n as f64;
    Ok(ExponentCheck {
        n,
        d,
        exponent,
        bound,
        holds: exponent >= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_case_by_hand() {
        // n = 10, D = 0.11: P = (1 + 10)/1024
        let c = binary_exponent_check(10, 0.11, 2.0).unwrap();
        assert!((c.exponent - (1024.0f64 / 11.0).log2() / 10.0).abs() < 1e-12);
        assert!(c.holds);
    }
}

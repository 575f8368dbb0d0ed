//! Wiretapper attacks: the optimal list (henchman) at tiny blocklengths, a
//! greedy surrogate, the key-search and ignore-Z strategies, and the
//! spherical covering geometry behind the Gaussian analysis.
//!
//! Success always means `d(Sⁿ, Šⁿ) ≤ D₀` for some list entry `Šⁿ`.

mod cap;
mod exhaustive;
mod quantizer;
mod structured;

pub use cap::{covering_count_estimate, ln_beta_inc, spherical_cap_ratio, CapRatio, CoveringEstimate};
pub use exhaustive::{
    exhaustive_henchman, greedy_henchman, greedy_value, index_to_sequence, sequence_to_index,
    simulate_list_attack, BinaryInstance, CandidatePool, HenchmanCode, MAX_EXHAUSTIVE_KEY_BITS,
    MAX_EXHAUSTIVE_N, MAX_SEARCH_NODES,
};
pub use quantizer::{QuantizerMode, EXPLICIT_CODEBOOK_LIMIT};
pub use structured::{ignore_z_attack, keysearch_attack, AttackBudget};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{KeyedRng, ModelError};
use crate::permute::SchemeError;
use crate::stats::wilson_interval;

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("instance too large for exhaustive search: {what} = {size} exceeds {limit}")]
    TooLarge {
        what: &'static str,
        size: String,
        limit: String,
    },
    #[error("candidate pool is empty")]
    EmptyPool,
    #[error("quantizer margin must be > 0 bits, got {0}")]
    NonPositiveMargin(f64),
    #[error("attack does not apply: {0}")]
    Inapplicable(String),
    #[error("`{name}` = {value} is out of range: {reason}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

impl From<crate::codebook::CodebookError> for AttackError {
    fn from(e: crate::codebook::CodebookError) -> Self {
        AttackError::Scheme(e.into())
    }
}

/// Monte-Carlo success estimate with a 95% Wilson interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackResult {
    pub strategy: String,
    #[serde(rename = "R_n")]
    pub list_rate: f64,
    #[serde(rename = "D0")]
    pub d0: f64,
    pub n: usize,
    pub success: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub successes: u64,
    pub trials: u64,
    pub seed: u64,
}

impl AttackResult {
    pub fn from_counts(strategy: &str, list_rate: f64, d0: f64, n: usize, successes: u64, trials: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, 0.95);
        AttackResult {
            strategy: strategy.to_owned(),
            list_rate,
            d0,
            n,
            success: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
            ci_low,
            ci_high,
            successes,
            trials,
            seed,
        }
    }
}

/// Runs `trial` on the streams `(seed, t)` for t in 0..trials, in parallel,
/// and counts successes.
pub(crate) fn count_successes<F>(trials: u64, seed: u64, trial: F) -> Result<u64, AttackError>
where
    F: Fn(KeyedRng) -> Result<bool, AttackError> + Sync,
{
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| trial(KeyedRng::new(seed, t)))
        .collect::<Result<Vec<bool>, _>>()?;
    Ok(outcomes.into_iter().filter(|&b| b).count() as u64)
}

/// Largest integer count k with k/n ≤ d (Hamming distortion budget).
pub(crate) fn hamming_budget(n: usize, d0: f64) -> usize {
    let k = (n as f64 * d0 + 1e-9).floor();
    if k < 0.0 {
        0
    } else {
        (k as usize).min(n)
    }
}

/// ⌊n·rate⌋ list bits.
pub(crate) fn list_bits(n: usize, rate: f64) -> Result<u64, AttackError> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(AttackError::OutOfRange {
            name: "R_n",
            value: rate,
            reason: "list rate must be finite and >= 0",
        });
    }
    Ok((n as f64 * rate + 1e-9).floor() as u64)
}

pub(crate) fn check_d0(d0: f64) -> Result<(), AttackError> {
    if !(d0 >= 0.0) || !d0.is_finite() {
        return Err(AttackError::OutOfRange {
            name: "D0",
            value: d0,
            reason: "distortion target must be finite and >= 0",
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn result_interval_contains_estimate() {
        for (s, t) in [(0, 10), (10, 10), (3, 7), (99_999, 100_000)] {
            let r = AttackResult::from_counts("x", 0.0, 0.0, 1, s, t, 0);
            assert!(r.ci_low <= r.success && r.success <= r.ci_high);
            assert!(r.ci_low >= 0.0 && r.ci_high <= 1.0);
        }
    }

    #[test]
    fn budgets() {
        assert_eq!(hamming_budget(100, 0.11), 11);
        assert_eq!(hamming_budget(3, 1.0 / 3.0), 1);
        assert_eq!(list_bits(10, 0.3).unwrap(), 3);
        assert!(list_bits(10, -0.1).is_err());
    }

    #[test]
    fn json_field_names() {
        let r = AttackResult::from_counts("keysearch", 0.5, 0.1, 8, 1, 2, 7);
        let v = serde_json::to_value(&r).unwrap();
        for f in ["strategy", "R_n", "D0", "n", "success", "ci_low", "ci_high", "trials", "seed"] {
            assert!(v.get(f).is_some(), "{f}");
        }
    }
}

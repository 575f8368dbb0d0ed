//! Structured attacks that scale to long blocks.
//!
//! Key search spends the list budget on the key first and the remainder on
//! a random code for the residual `Sⁿ − ŝ(Zⁿ)` left by the wiretapper's
//! estimate under the right key. Ignore-Z quantizes Sⁿ directly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::quantizer::{binary_codeword_bias, BinaryQuantizer, QuantizerMode, SphereQuantizer};
use super::{check_d0, count_successes, hamming_budget, list_bits, AttackError, AttackResult};
use crate::models::{linear_mmse, sample_source_block, transmit, Block, KeyedRng, Receiver, SourceKind, SourceModel};
use crate::rd::{binary_convolve, h2, half_log_plus};
use crate::scheme::SchemeInstance;

/// How a key-search list rate is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum AttackBudget {
    /// Total list rate R_n in bits per symbol.
    ListRate(f64),
    /// R_n = key bits/n + residual rate-distortion rate + margin.
    Margin(f64),
}

enum Residual {
    /// Residual flips are i.i.d. Bern(q).
    Binary { q: f64 },
    /// Residual is i.i.d. N(0, γ).
    Gaussian { variance: f64 },
}

impl Residual {
    fn of(scheme: &SchemeInstance) -> Result<Self, AttackError> {
        let system = scheme.system();
        match system.source.kind {
            SourceKind::Bernoulli { .. } => {
                let pp = system.test_crossover().ok_or_else(|| inapplicable("binary mapping expected"))?;
                let p0 = system
                    .channel
                    .crossover(Receiver::Wiretapper)
                    .ok_or_else(|| inapplicable("binary channel expected"))?;
                Ok(Residual::Binary {
                    q: binary_convolve(pp, p0).expect("validated crossovers"),
                })
            }
            SourceKind::Gaussian { variance } => {
                let power = match system.params.mapping {
                    crate::models::SymbolMapping::Linear { power } => power,
                    _ => return Err(inapplicable("linear mapping expected")),
                };
                let n0 = system.channel.noise(Receiver::Wiretapper).expect("scalar AWGN");
                Ok(Residual::Gaussian {
                    variance: linear_mmse(variance, power, n0),
                })
            }
            SourceKind::VectorGaussian { .. } => Err(inapplicable("vector sources are not attacked")),
        }
    }

    /// Point-to-point R-D rate of the residual at D₀.
    fn rate(&self, d0: f64) -> f64 {
        match *self {
            Residual::Binary { q } => {
                if d0 >= q {
                    0.0
                } else {
                    h2(q) - h2(d0)
                }
            }
            Residual::Gaussian { variance } => half_log_plus(variance / d0),
        }
    }
}

fn inapplicable(msg: &str) -> AttackError {
    AttackError::Inapplicable(msg.into())
}

/// Whether `word` lies within D₀ of some codeword of a fresh 2^bits random
/// code matched to `source` (for a residual, the residual's law).
fn quantize(word: &Block, law: &Residual, d0: f64, bits: u64, mode: QuantizerMode, rng: &mut KeyedRng) -> bool {
    match (word, law) {
        (Block::Binary(w), Residual::Binary { q }) => BinaryQuantizer {
            n: w.len(),
            bias: binary_codeword_bias(*q, d0),
            bits,
            budget: hamming_budget(w.len(), d0),
        }
        .covers(w, mode, rng),
        (Block::Real(w), Residual::Gaussian { variance }) => {
            SphereQuantizer::new(w.len(), *variance, d0, bits).covers(w, mode, rng)
        }
        _ => false,
    }
}

/// Z-blind single guess: 0ⁿ (or 1ⁿ for a source biased towards ones).
fn blind_success(s: &Block, d0: f64) -> bool {
    match s {
        Block::Binary(v) => {
            let ones = v.iter().filter(|&&b| b != 0).count();
            let errors = ones.min(v.len() - ones);
            errors <= hamming_budget(v.len(), d0)
        }
        Block::Real(v) => v.iter().map(|x| x * x).sum::<f64>() <= v.len() as f64 * d0,
        Block::Vector(_) => false,
    }
}

/// Key search: with ⌊nR_n⌋ list bits the first min(⌊nR_n⌋, key bits)
/// name keys. Holding the right key, the attacker forms the wiretapper
/// decoder's estimate and refines it with the remaining bits. Otherwise it
/// falls back to the Z-blind guess.
pub fn keysearch_attack(
    scheme: &SchemeInstance,
    d0: f64,
    budget: AttackBudget,
    mode: QuantizerMode,
    trials: u64,
    seed: u64,
) -> Result<AttackResult, AttackError> {
    check_d0(d0)?;
    let residual = Residual::of(scheme)?;
    let system = scheme.system();
    let n = system.n();
    let key_bits = scheme.key_bits();
    let list_rate = match budget {
        AttackBudget::ListRate(r) => r,
        AttackBudget::Margin(m) if !(m > 0.0) => return Err(AttackError::NonPositiveMargin(m)),
        AttackBudget::Margin(m) => key_bits as f64 / n as f64 + residual.rate(d0) + m,
    };
    let bits = list_bits(n, list_rate)?;
    let spent = bits.min(key_bits);
    let refine = bits - spent;
    let p_key = (spent as f64 - key_bits as f64).exp2();
    let successes = count_successes(trials, seed, |rng| {
        let s = sample_source_block(&system.source, n, &mut rng.fork(0));
        let key = scheme.random_key(&mut rng.fork(1));
        let x = scheme.encode(&s, &key, &mut rng.fork(2))?;
        let out = transmit(&system.channel, &x, &rng.fork(3))?;
        if spent < key_bits && rng.fork(4).random::<f64>() >= p_key {
            return Ok(blind_success(&s, d0));
        }
        let estimate = scheme.decode(&out.z, &key, Receiver::Wiretapper)?;
        let word = match (&s, &estimate) {
            (Block::Binary(a), Block::Binary(b)) => Block::Binary(a.iter().zip(b).map(|(x, y)| x ^ y).collect()),
            (Block::Real(a), Block::Real(b)) => Block::Real(a.iter().zip(b).map(|(x, y)| x - y).collect()),
            _ => return Err(inapplicable("source and estimate kinds differ")),
        };
        Ok(quantize(&word, &residual, d0, refine, mode, &mut rng.fork(5)))
    })?;
    Ok(AttackResult::from_counts("keysearch", list_rate, d0, n, successes, trials, seed))
}

/// Ignore Zⁿ and quantize Sⁿ with a random code of rate `rate` drawn from
/// the source's optimal test channel.
pub fn ignore_z_attack(
    source: &SourceModel,
    n: usize,
    d0: f64,
    rate: f64,
    mode: QuantizerMode,
    trials: u64,
    seed: u64,
) -> Result<AttackResult, AttackError> {
    check_d0(d0)?;
    let law = match source.kind {
        SourceKind::Bernoulli { p } => Residual::Binary { q: p },
        SourceKind::Gaussian { variance } => Residual::Gaussian { variance },
        SourceKind::VectorGaussian { .. } => return Err(inapplicable("vector sources are not attacked")),
    };
    let bits = list_bits(n, rate)?;
    let successes = count_successes(trials, seed, |rng| {
        let s = sample_source_block(source, n, &mut rng.fork(0));
        Ok(quantize(&s, &law, d0, bits, mode, &mut rng.fork(5)))
    })?;
    Ok(AttackResult::from_counts("ignore_z", rate, d0, n, successes, trials, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::StorageMode;
    use crate::models::{BroadcastChannel, SchemeParams, SymbolMapping, System};
    use crate::scheme::SchemeKind;

    fn binary(n: usize, key_rate: f64, p_prime: f64, p0: f64) -> SchemeInstance {
        let system = System::new(
            SourceModel::bernoulli_half(),
            BroadcastChannel::binary(p0, 0.1, 0.2).unwrap(),
            SchemeParams::new(n, key_rate, SymbolMapping::BinaryTestChannel { crossover: p_prime }).unwrap(),
        )
        .unwrap();
        SchemeInstance::build(SchemeKind::Permutation, system, 1, StorageMode::Lazy).unwrap()
    }

    fn gaussian(kind: SchemeKind, n: usize, key_rate: f64, n0: f64) -> SchemeInstance {
        let system = System::new(
            SourceModel::gaussian(1.0).unwrap(),
            BroadcastChannel::awgn(n0, 1.0, 1.0, 1.0).unwrap(),
            SchemeParams::new(n, key_rate, SymbolMapping::Linear { power: 1.0 }).unwrap(),
        )
        .unwrap();
        SchemeInstance::build(kind, system, 1, StorageMode::Lazy).unwrap()
    }

    #[test]
    fn known_key_binary_inversion() {
        let sc = binary(2000, 0.5, 0.0, 0.1);
        let r = keysearch_attack(&sc, 0.12, AttackBudget::ListRate(0.5), QuantizerMode::Auto, 100, 1).unwrap();
        assert!(r.success >= 0.95, "{r:?}");
    }

    #[test]
    fn margin_must_be_positive() {
        let sc = binary(100, 0.5, 0.0, 0.1);
        for m in [0.0, -0.1] {
            assert!(matches!(
                keysearch_attack(&sc, 0.05, AttackBudget::Margin(m), QuantizerMode::Auto, 1, 1),
                Err(AttackError::NonPositiveMargin(_))
            ));
        }
    }

    #[test]
    fn binary_margin_covers() {
        let sc = binary(1000, 0.5, 0.0, 0.1);
        let r = keysearch_attack(&sc, 0.05, AttackBudget::Margin(0.1), QuantizerMode::Analytic, 100, 2).unwrap();
        assert!(r.success >= 0.9, "{r:?}");
    }

    #[test]
    fn gaussian_linear_estimate_suffices() {
        // γ = 1/2; D₀ slightly above needs no refinement.
        for kind in [SchemeKind::Orthogonal, SchemeKind::Permutation] {
            let sc = gaussian(kind, 256, 1.0 / 256.0, 1.0);
            let r = keysearch_attack(&sc, 0.65, AttackBudget::ListRate(1.0 / 256.0), QuantizerMode::Auto, 100, 3).unwrap();
            assert!(r.success >= 0.95, "{kind:?} {r:?}");
        }
        let sc = gaussian(SchemeKind::SignChange, 256, 1.0, 1.0);
        let r = keysearch_attack(&sc, 0.65, AttackBudget::ListRate(1.0), QuantizerMode::Auto, 100, 3).unwrap();
        assert!(r.success >= 0.95, "{r:?}");
    }

    #[test]
    fn gaussian_refinement_with_margin() {
        let sc = gaussian(SchemeKind::Orthogonal, 400, 0.01, 1.0);
        let r = keysearch_attack(&sc, 0.3, AttackBudget::Margin(0.1), QuantizerMode::Analytic, 100, 4).unwrap();
        assert!(r.success >= 0.9, "{r:?}");
    }

    #[test]
    fn keyless_blind_guess() {
        let sc = gaussian(SchemeKind::Orthogonal, 512, 1.0, 1.0);
        let r = keysearch_attack(&sc, 1.2, AttackBudget::ListRate(0.0), QuantizerMode::Auto, 100, 5).unwrap();
        assert!(r.success >= 0.95, "{r:?}");
    }

    #[test]
    fn ignore_z_examples() {
        let src = SourceModel::bernoulli_half();
        let rate = 1.0 - h2(0.11) + 0.1;
        let r = ignore_z_attack(&src, 400, 0.11, rate, QuantizerMode::Analytic, 200, 6).unwrap();
        assert!(r.success >= 0.9, "{r:?}");
        let r = ignore_z_attack(&src, 400, 0.6, 0.0, QuantizerMode::Auto, 200, 6).unwrap();
        assert_eq!(r.success, 1.0);
        let r = ignore_z_attack(&src, 400, 0.0, 0.9, QuantizerMode::Analytic, 200, 6).unwrap();
        assert_eq!(r.success, 0.0);
    }

    #[test]
    fn vector_sources_rejected() {
        let src = SourceModel::vector_gaussian(vec![1.0, 0.5]).unwrap();
        assert!(matches!(
            ignore_z_attack(&src, 10, 0.1, 1.0, QuantizerMode::Auto, 1, 1),
            Err(AttackError::Inapplicable(_))
        ));
    }
}

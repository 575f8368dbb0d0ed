//! Permutation-based uncoded scheme and the method-of-types utilities behind
//! its analysis.

mod types;

pub use types::{
    enumerate_type_class, type_class_size, type_of, uniformity_test, SequenceType, TypeClassSize,
    TypeError, UniformityReport, MAX_ENUMERATED_CLASS,
};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::codebook::{Codebook, CodebookError, EntrySampler, Key, StorageMode, DEFAULT_MEMORY_BUDGET};
use crate::models::{Block, KeyedRng, ModelError, Receiver, System};

/// A permutation σ of [n]; applying it to s gives `(s[σ₀], …, s[σ_{n−1}])`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn new(forward: Vec<usize>) -> Result<Self, CodebookError> {
        let n = forward.len();
        let mut inverse = vec![usize::MAX; n];
        for (t, &s) in forward.iter().enumerate() {
            if s >= n || inverse[s] != usize::MAX {
                return Err(CodebookError::Mismatch(format!(
                    "not a permutation of [{n}]: index {s} at position {t}"
                )));
            }
            inverse[s] = t;
        }
        Ok(Permutation { forward, inverse })
    }

    /// From 1-based indices, as permutations are usually written.
    pub fn from_one_based(sigma: &[usize]) -> Result<Self, CodebookError> {
        Permutation::new(sigma.iter().map(|&s| s.wrapping_sub(1)).collect())
    }

    pub fn identity(n: usize) -> Self {
        let forward: Vec<usize> = (0..n).collect();
        Permutation {
            inverse: forward.clone(),
            forward,
        }
    }

    /// Uniform on the symmetric group (Fisher–Yates).
    pub fn random(n: usize, rng: &mut KeyedRng) -> Self {
        let mut forward: Vec<usize> = (0..n).collect();
        forward.shuffle(rng);
        Permutation::new(forward).expect("shuffle of the identity")
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(t, &s)| t == s)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, CodebookError> {
        self.check_len(other.len())?;
        Permutation::new(self.forward.iter().map(|&f| other.forward[f]).collect())
    }

    pub fn apply<T: Clone>(&self, s: &[T]) -> Result<Vec<T>, CodebookError> {
        self.check_len(s.len())?;
        Ok(self.forward.iter().map(|&i| s[i].clone()).collect())
    }

    pub fn apply_inverse<T: Clone>(&self, s: &[T]) -> Result<Vec<T>, CodebookError> {
        self.check_len(s.len())?;
        Ok(self.inverse.iter().map(|&i| s[i].clone()).collect())
    }

    pub fn apply_block(&self, b: &Block) -> Result<Block, CodebookError> {
        self.map_block(b, false)
    }

    pub fn apply_inverse_block(&self, b: &Block) -> Result<Block, CodebookError> {
        self.map_block(b, true)
    }

    fn map_block(&self, b: &Block, inverse: bool) -> Result<Block, CodebookError> {
        let f = |v: &[f64]| {
            if inverse {
                self.apply_inverse(v)
            } else {
                self.apply(v)
            }
        };
        Ok(match b {
            Block::Binary(v) => Block::Binary(if inverse {
                self.apply_inverse(v)?
            } else {
                self.apply(v)?
            }),
            Block::Real(v) => Block::Real(f(v)?),
            Block::Vector(rows) => Block::Vector(rows.iter().map(|r| f(r)).collect::<Result<_, _>>()?),
        })
    }

    /// Lexicographic rank in the symmetric group (Lehmer code), for small n.
    pub fn rank(&self) -> u64 {
        let n = self.len();
        let mut rank = 0u64;
        for i in 0..n {
            let smaller = self.forward[i + 1..]
                .iter()
                .filter(|&&x| x < self.forward[i])
                .count() as u64;
            rank = rank * (n - i) as u64 + smaller;
        }
        rank
    }

    fn check_len(&self, len: usize) -> Result<(), CodebookError> {
        if len != self.len() {
            return Err(CodebookError::Mismatch(format!(
                "permutation of length {} applied to length {len}",
                self.len()
            )));
        }
        Ok(())
    }
}

/// Uniform permutations of [n].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermutationSampler {
    pub n: usize,
}

impl EntrySampler for PermutationSampler {
    type Entry = Permutation;

    fn sample(&self, rng: &mut KeyedRng) -> Result<Permutation, CodebookError> {
        Ok(Permutation::random(self.n, rng))
    }

    fn identity(&self) -> Permutation {
        Permutation::identity(self.n)
    }

    fn entry_cost(&self) -> u64 {
        2 * self.n as u64
    }
}

pub type PermutationCodebook = Codebook<PermutationSampler>;

/// `2^{⌈nR_K⌉}` independent uniform permutations of [n].
pub fn gen_permutation_codebook(
    n: usize,
    key_bits: u64,
    seed: u64,
    mode: StorageMode,
) -> Result<PermutationCodebook, CodebookError> {
    Codebook::generate(PermutationSampler { n }, key_bits, seed, mode, DEFAULT_MEMORY_BUDGET)
}

#[derive(Debug, thiserror::Error)]
pub enum SchemeError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Codebook(#[from] CodebookError),
}

impl From<SchemeError> for crate::Error {
    fn from(e: SchemeError) -> Self {
        match e {
            SchemeError::Model(m) => m.into(),
            SchemeError::Codebook(c) => c.into(),
        }
    }
}

/// Permute, then a memoryless symbol map: `X = S' ⊕ E` (binary) or
/// `X = αS'` (Gaussian). Decoders estimate symbol by symbol and undo the
/// permutation.
#[derive(Debug, Clone)]
pub struct PermutationScheme {
    system: System,
    codebook: PermutationCodebook,
}

impl PermutationScheme {
    pub fn new(system: System, codebook_seed: u64, mode: StorageMode) -> Result<Self, SchemeError> {
        if system.source.components() != 1 {
            return Err(ModelError::field("source", "permutation scheme takes scalar sources").into());
        }
        let key_bits = system.params.key_bits()?;
        let codebook = gen_permutation_codebook(system.n(), key_bits, codebook_seed, mode)?;
        Ok(PermutationScheme { system, codebook })
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    pub fn codebook(&self) -> &PermutationCodebook {
        &self.codebook
    }

    pub fn encode(&self, s: &Block, key: &Key, rng: &mut KeyedRng) -> Result<Block, SchemeError> {
        let psi = self.codebook.entry(key)?;
        self.encode_with(&psi, s, rng)
    }

    /// Encoding with an explicit permutation (the attack code replays this).
    pub fn encode_with(
        &self,
        psi: &Permutation,
        s: &Block,
        rng: &mut KeyedRng,
    ) -> Result<Block, SchemeError> {
        let permuted = psi.apply_block(s)?;
        Ok(match permuted {
            Block::Binary(v) => {
                let p = self
                    .system
                    .test_crossover()
                    .ok_or_else(|| mismatch("binary block for a non-binary scheme"))?;
                let e = crate::models::bernoulli_noise(p, v.len(), rng);
                Block::Binary(v.iter().zip(e).map(|(a, b)| a ^ b).collect())
            }
            Block::Real(v) => {
                let a = self
                    .system
                    .alpha()
                    .ok_or_else(|| mismatch("real block for a non-Gaussian scheme"))?;
                Block::Real(v.iter().map(|x| a * x).collect())
            }
            Block::Vector(_) => return Err(mismatch("vector block")),
        })
    }

    pub fn decode(&self, y: &Block, key: &Key, receiver: Receiver) -> Result<Block, SchemeError> {
        let psi = self.codebook.entry(key)?;
        self.decode_with(&psi, y, receiver)
    }

    pub fn decode_with(
        &self,
        psi: &Permutation,
        y: &Block,
        receiver: Receiver,
    ) -> Result<Block, SchemeError> {
        let estimate = match y {
            // ŝ(y) = y is the MAP rule while p'⋆p_i ≤ 1/2.
            Block::Binary(v) => Block::Binary(v.clone()),
            Block::Real(v) => {
                let b = self
                    .system
                    .beta(receiver)
                    .ok_or_else(|| mismatch("real block for a non-Gaussian scheme"))?;
                Block::Real(v.iter().map(|x| b * x).collect())
            }
            Block::Vector(_) => return Err(mismatch("vector block")),
        };
        Ok(psi.apply_inverse_block(&estimate)?)
    }
}

fn mismatch(msg: &str) -> SchemeError {
    SchemeError::Model(ModelError::BlockMismatch(msg.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{BroadcastChannel, SchemeParams, SourceModel, SymbolMapping};

    #[test]
    fn definition_example() {
        let psi = Permutation::from_one_based(&[3, 1, 2]).unwrap();
        assert_eq!(psi.apply(&['a', 'b', 'c']).unwrap(), vec!['c', 'a', 'b']);
        assert_eq!(psi.apply_inverse(&['c', 'a', 'b']).unwrap(), vec!['a', 'b', 'c']);
        assert!(psi.compose(&psi.inverse()).unwrap().is_identity());
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(psi.apply(&[1, 2]).is_err());
    }

    #[test]
    fn rank_is_bijective_on_s3() {
        let mut seen = std::collections::HashSet::new();
        for p in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            seen.insert(Permutation::new(p.to_vec()).unwrap().rank());
        }
        assert_eq!(seen, (0..6).collect());
    }

    #[test]
    fn singleton_group() {
        let book = gen_permutation_codebook(1, 3, 5, StorageMode::Auto).unwrap();
        for i in 0..8 {
            assert!(book.entry(&Key::from_index(3, i).unwrap()).unwrap().is_identity());
        }
    }

    fn binary_system(p_prime: f64, p: [f64; 3], n: usize, rk: f64) -> System {
        System::new(
            SourceModel::bernoulli_half(),
            BroadcastChannel::binary(p[0], p[1], p[2]).unwrap(),
            SchemeParams::new(n, rk, SymbolMapping::BinaryTestChannel { crossover: p_prime }).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn keyless_noiseless_roundtrip() {
        let scheme = PermutationScheme::new(binary_system(0.0, [0.0; 3], 3, 0.0), 1, StorageMode::Auto).unwrap();
        let key = Key::from_index(0, 0).unwrap();
        let s = Block::Binary(vec![1, 0, 1]);
        let x = scheme.encode(&s, &key, &mut KeyedRng::new(0, 0)).unwrap();
        assert_eq!(x, s);
        assert_eq!(scheme.decode(&x, &key, Receiver::User1).unwrap(), s);
    }

    #[test]
    fn test_channel_flip_rate() {
        let n = 100_000;
        let scheme = PermutationScheme::new(binary_system(0.1, [0.0; 3], n, 2.0 / n as f64), 3, StorageMode::Auto).unwrap();
        let mut rng = KeyedRng::new(4, 0);
        let key = scheme.codebook().random_key(&mut rng);
        let s = crate::models::sample_source_block(&scheme.system().source, n, &mut rng);
        let x = scheme.encode(&s, &key, &mut rng).unwrap();
        let psi = scheme.codebook().entry(&key).unwrap();
        let permuted = psi.apply_block(&s).unwrap();
        let d = permuted.distortion(&x, crate::models::Distortion::Hamming).unwrap();
        assert!((d - 0.1).abs() < 0.005, "{d}");
    }

    #[test]
    fn gaussian_key_cancels() {
        let sys = System::new(
            SourceModel::gaussian(2.0).unwrap(),
            BroadcastChannel::awgn(1.0, 0.0, 1.0, 2.0).unwrap(),
            SchemeParams::new(16, 0.5, SymbolMapping::Linear { power: 2.0 }).unwrap(),
        )
        .unwrap();
        let scheme = PermutationScheme::new(sys, 9, StorageMode::Auto).unwrap();
        let mut rng = KeyedRng::new(1, 1);
        let s = crate::models::sample_source_block(&scheme.system().source, 16, &mut rng);
        let key = scheme.codebook().random_key(&mut rng);
        let x = scheme.encode(&s, &key, &mut rng).unwrap();
        let shat = scheme.decode(&x, &key, Receiver::User1).unwrap();
        for (a, b) in s.as_real().unwrap().iter().zip(shat.as_real().unwrap()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

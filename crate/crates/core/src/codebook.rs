//! Public codebooks indexed by a secret key.
//!
//! Entry `k` is always drawn from its own stream derived from
//! `(codebook seed, k)`, so a materialized codebook and a lazily evaluated one
//! hold identical entries. Lazy evaluation is what makes key lengths of
//! thousands of bits usable.

use std::borrow::Cow;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::{label_hash, mix, KeyedRng};

/// Longest supported key, in bits.
pub const MAX_KEY_BITS: u64 = 1 << 16;

/// Default materialization budget, in stored scalars (8 bytes each).
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 26;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodebookError {
    #[error("key of {bits} bits exceeds the addressable maximum of {max} bits")]
    Overflow { bits: u64, max: u64 },
    #[error("key has {got} bits but the codebook uses {expected}")]
    KeyOutOfRange { expected: u64, got: u64 },
    #[error("codebook needs {needed} stored scalars, budget is {budget}")]
    MemoryBudget { needed: u128, budget: u64 },
    #[error("matrix sampling hit a numerically singular draw {attempts} times in a row")]
    Singular { attempts: usize },
    #[error("{0}")]
    Mismatch(String),
}

/// A key of `bits` bits packed little-endian into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Key {
    bits: u64,
    words: Vec<u64>,
}

impl Key {
    pub fn new(bits: u64, words: Vec<u64>) -> Result<Self, CodebookError> {
        if bits > MAX_KEY_BITS {
            return Err(CodebookError::Overflow {
                bits,
                max: MAX_KEY_BITS,
            });
        }
        let want = bits.div_ceil(64) as usize;
        if words.len() != want {
            return Err(CodebookError::Mismatch(format!(
                "{bits}-bit key needs {want} words, got {}",
                words.len()
            )));
        }
        if !bits.is_multiple_of(64) {
            if let Some(last) = words.last() {
                if last >> (bits % 64) != 0 {
                    return Err(CodebookError::KeyOutOfRange {
                        expected: bits,
                        got: 64 * want as u64 - u64::from(last.leading_zeros()),
                    });
                }
            }
        }
        Ok(Key { bits, words })
    }

    /// Key number `index` in a codebook of `bits`-bit keys.
    pub fn from_index(bits: u64, index: u64) -> Result<Self, CodebookError> {
        if bits == 0 {
            return if index == 0 {
                Key::new(0, vec![])
            } else {
                Err(CodebookError::KeyOutOfRange { expected: 0, got: 64 - u64::from(index.leading_zeros()) })
            };
        }
        let mut words = vec![0; bits.div_ceil(64) as usize];
        words[0] = index;
        Key::new(bits, words)
    }

    /// Uniform key.
    pub fn random(bits: u64, rng: &mut impl RngCore) -> Result<Self, CodebookError> {
        let mut words: Vec<u64> = (0..bits.div_ceil(64)).map(|_| rng.next_u64()).collect();
        if !bits.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (bits % 64)) - 1;
            }
        }
        Key::new(bits, words)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Bit `i` of the key.
    pub fn bit(&self, i: u64) -> bool {
        i < self.bits && (self.words[(i / 64) as usize] >> (i % 64)) & 1 == 1
    }

    /// Key number, when it fits in a machine word.
    pub fn index(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn stream_id(&self) -> u64 {
        self.words
            .iter()
            .fold(mix(label_hash("codebook-entry"), self.bits), |h, w| mix(h, *w))
    }
}

/// Draws one codebook entry from a dedicated stream.
pub trait EntrySampler: Sync {
    type Entry: Clone + Send + Sync;

    fn sample(&self, rng: &mut KeyedRng) -> Result<Self::Entry, CodebookError>;

    /// The single entry of a keyless (zero-bit) codebook: no transform.
    fn identity(&self) -> Self::Entry;

    /// Stored scalars per entry.
    fn entry_cost(&self) -> u64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StorageMode {
    /// Materialize when within budget, otherwise derive entries on demand.
    #[default]
    Auto,
    /// Always materialize; over-budget codebooks are an error.
    Materialized,
    /// Never materialize.
    Lazy,
}

#[derive(Debug, Clone)]
pub struct Codebook<S: EntrySampler> {
    sampler: S,
    key_bits: u64,
    seed: u64,
    stored: Option<Vec<S::Entry>>,
}

impl<S: EntrySampler> Codebook<S> {
    pub fn generate(
        sampler: S,
        key_bits: u64,
        seed: u64,
        mode: StorageMode,
        budget: u64,
    ) -> Result<Self, CodebookError> {
        if key_bits > MAX_KEY_BITS {
            return Err(CodebookError::Overflow {
                bits: key_bits,
                max: MAX_KEY_BITS,
            });
        }
        let mut book = Codebook {
            sampler,
            key_bits,
            seed,
            stored: None,
        };
        if key_bits == 0 {
            book.stored = Some(vec![book.sampler.identity()]);
            return Ok(book);
        }
        let needed: u128 = if key_bits >= 64 {
            u128::MAX
        } else {
            (1u128 << key_bits) * u128::from(book.sampler.entry_cost().max(1))
        };
        let fits = needed <= u128::from(budget);
        match (mode, fits) {
            (StorageMode::Lazy, _) | (StorageMode::Auto, false) => {}
            (StorageMode::Materialized, false) => {
                return Err(CodebookError::MemoryBudget { needed, budget })
            }
            (_, true) => {
                let count = 1u64 << key_bits;
                let entries = (0..count)
                    .into_par_iter()
                    .map(|i| {
                        let key = Key::from_index(key_bits, i)?;
                        book.derive(&key)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                book.stored = Some(entries);
            }
        }
        Ok(book)
    }

    pub fn key_bits(&self) -> u64 {
        self.key_bits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sampler(&self) -> &S {
        &self.sampler
    }

    pub fn is_materialized(&self) -> bool {
        self.stored.is_some()
    }

    /// Number of entries, when it fits in a u64.
    pub fn len(&self) -> Option<u64> {
        (self.key_bits < 64).then(|| 1u64 << self.key_bits)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn random_key(&self, rng: &mut impl RngCore) -> Key {
        Key::random(self.key_bits, rng).expect("key length checked at construction")
    }

    pub fn entry(&self, key: &Key) -> Result<Cow<'_, S::Entry>, CodebookError> {
        if key.bits() != self.key_bits {
            return Err(CodebookError::KeyOutOfRange {
                expected: self.key_bits,
                got: key.bits(),
            });
        }
        match &self.stored {
            Some(entries) => {
                let i = key.index().expect("materialized keys fit in a word") as usize;
                Ok(Cow::Borrowed(&entries[i]))
            }
            None => self.derive(key).map(Cow::Owned),
        }
    }

    fn derive(&self, key: &Key) -> Result<S::Entry, CodebookError> {
        let mut rng = KeyedRng::new(self.seed, key.stream_id());
        self.sampler.sample(&mut rng)
    }
}

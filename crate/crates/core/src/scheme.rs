//! A single handle over the three keyed codecs.

use crate::codebook::{Key, StorageMode};
use crate::models::{Block, KeyedRng, Receiver, SourceKind, System};
use crate::ortho::{OrthogonalScheme, SignChangeScheme};
use crate::permute::{PermutationScheme, SchemeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Permutation,
    Orthogonal,
    SignChange,
}

#[derive(Debug, Clone)]
pub enum SchemeInstance {
    Permutation(PermutationScheme),
    Orthogonal(OrthogonalScheme),
    SignChange(SignChangeScheme),
}

impl SchemeInstance {
    pub fn build(kind: SchemeKind, system: System, codebook_seed: u64, mode: StorageMode) -> Result<Self, SchemeError> {
        Ok(match kind {
            SchemeKind::Permutation => SchemeInstance::Permutation(PermutationScheme::new(system, codebook_seed, mode)?),
            SchemeKind::Orthogonal => SchemeInstance::Orthogonal(OrthogonalScheme::new(system, codebook_seed, mode)?),
            SchemeKind::SignChange => SchemeInstance::SignChange(SignChangeScheme::new(system)?),
        })
    }

    pub fn kind(&self) -> SchemeKind {
        match self {
            SchemeInstance::Permutation(_) => SchemeKind::Permutation,
            SchemeInstance::Orthogonal(_) => SchemeKind::Orthogonal,
            SchemeInstance::SignChange(_) => SchemeKind::SignChange,
        }
    }

    pub fn system(&self) -> &System {
        match self {
            SchemeInstance::Permutation(s) => s.system(),
            SchemeInstance::Orthogonal(s) => s.system(),
            SchemeInstance::SignChange(s) => s.system(),
        }
    }

    pub fn key_bits(&self) -> u64 {
        match self {
            SchemeInstance::Permutation(s) => s.codebook().key_bits(),
            SchemeInstance::Orthogonal(s) => s.key_bits(),
            SchemeInstance::SignChange(s) => s.system().n() as u64,
        }
    }

    pub fn random_key(&self, rng: &mut KeyedRng) -> Key {
        match self {
            SchemeInstance::Permutation(s) => s.codebook().random_key(rng),
            SchemeInstance::Orthogonal(s) => s.random_key(rng),
            SchemeInstance::SignChange(s) => s.random_key(rng),
        }
    }

    /// `rng` feeds the binary test-channel noise; the Gaussian maps are
    /// deterministic given the key.
    pub fn encode(&self, s: &Block, key: &Key, rng: &mut KeyedRng) -> Result<Block, SchemeError> {
        match self {
            SchemeInstance::Permutation(sc) => sc.encode(s, key, rng),
            SchemeInstance::Orthogonal(sc) => sc.encode(s, key),
            SchemeInstance::SignChange(sc) => sc.encode(s, key),
        }
    }

    pub fn decode(&self, y: &Block, key: &Key, receiver: Receiver) -> Result<Block, SchemeError> {
        match self {
            SchemeInstance::Permutation(sc) => sc.decode(y, key, receiver),
            SchemeInstance::Orthogonal(sc) => sc.decode(y, key, receiver),
            SchemeInstance::SignChange(sc) => sc.decode(y, key, receiver),
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self.system().source.kind, SourceKind::Bernoulli { .. })
    }
}

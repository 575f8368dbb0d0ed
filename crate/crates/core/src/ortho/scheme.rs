use crate::codebook::{Key, StorageMode};
use crate::models::{Block, ModelError, Receiver, SourceKind, System};
use crate::permute::SchemeError;

use super::{
    gen_orthogonal_bank, gen_orthogonal_codebook, OrthogonalBankCodebook, OrthogonalCodebook,
    OrthogonalMatrix,
};

#[derive(Debug, Clone)]
enum Book {
    Scalar(OrthogonalCodebook),
    Vector(OrthogonalBankCodebook),
}

/// `x = αΨ_k s`, `ŝ_i = β_i Ψ_kᵀ y_i`; per subchannel in the vector case.
#[derive(Debug, Clone)]
pub struct OrthogonalScheme {
    system: System,
    book: Book,
}

impl OrthogonalScheme {
    pub fn new(system: System, codebook_seed: u64, mode: StorageMode) -> Result<Self, SchemeError> {
        let key_bits = system.params.key_bits()?;
        let n = system.n();
        let book = match &system.source.kind {
            SourceKind::Gaussian { .. } => {
                Book::Scalar(gen_orthogonal_codebook(n, key_bits, codebook_seed, mode)?)
            }
            SourceKind::VectorGaussian { variances } => Book::Vector(gen_orthogonal_bank(
                n,
                variances.len(),
                key_bits,
                codebook_seed,
                mode,
            )?),
            SourceKind::Bernoulli { .. } => {
                return Err(ModelError::field("source", "orthogonal scheme needs a Gaussian source").into())
            }
        };
        Ok(OrthogonalScheme { system, book })
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    pub fn key_bits(&self) -> u64 {
        match &self.book {
            Book::Scalar(b) => b.key_bits(),
            Book::Vector(b) => b.key_bits(),
        }
    }

    pub fn random_key(&self, rng: &mut impl rand::RngCore) -> Key {
        match &self.book {
            Book::Scalar(b) => b.random_key(rng),
            Book::Vector(b) => b.random_key(rng),
        }
    }

    /// The matrices selected by `key`: one for the scalar scheme, m for the
    /// vector scheme.
    pub fn matrices(&self, key: &Key) -> Result<Vec<OrthogonalMatrix>, SchemeError> {
        Ok(match &self.book {
            Book::Scalar(b) => vec![b.entry(key)?.into_owned()],
            Book::Vector(b) => b.entry(key)?.into_owned(),
        })
    }

    pub fn encode(&self, s: &Block, key: &Key) -> Result<Block, SchemeError> {
        self.encode_with(&self.matrices(key)?, s)
    }

    pub fn encode_with(&self, psi: &[OrthogonalMatrix], s: &Block) -> Result<Block, SchemeError> {
        match s {
            Block::Real(v) => {
                let a = self.system.alpha().ok_or_else(|| mismatch("scalar block"))?;
                let x = single(psi)?.apply(v)?;
                Ok(Block::Real(x.into_iter().map(|t| a * t).collect()))
            }
            Block::Vector(rows) => {
                let alphas = self.system.alphas().ok_or_else(|| mismatch("vector block"))?;
                check_bank(psi, rows.len())?;
                Ok(Block::Vector(
                    rows.iter()
                        .zip(psi)
                        .zip(alphas)
                        .map(|((r, m), a)| Ok(m.apply(r)?.into_iter().map(|t| a * t).collect()))
                        .collect::<Result<_, SchemeError>>()?,
                ))
            }
            Block::Binary(_) => Err(mismatch("binary block")),
        }
    }

    pub fn decode(&self, y: &Block, key: &Key, receiver: Receiver) -> Result<Block, SchemeError> {
        self.decode_with(&self.matrices(key)?, y, receiver)
    }

    pub fn decode_with(
        &self,
        psi: &[OrthogonalMatrix],
        y: &Block,
        receiver: Receiver,
    ) -> Result<Block, SchemeError> {
        match y {
            Block::Real(v) => {
                let b = self.system.beta(receiver).ok_or_else(|| mismatch("scalar block"))?;
                let s = single(psi)?.apply_transpose(v)?;
                Ok(Block::Real(s.into_iter().map(|t| b * t).collect()))
            }
            Block::Vector(rows) => {
                let betas = self.system.betas(receiver).ok_or_else(|| mismatch("vector block"))?;
                check_bank(psi, rows.len())?;
                Ok(Block::Vector(
                    rows.iter()
                        .zip(psi)
                        .zip(betas)
                        .map(|((r, m), b)| Ok(m.apply_transpose(r)?.into_iter().map(|t| b * t).collect()))
                        .collect::<Result<_, SchemeError>>()?,
                ))
            }
            Block::Binary(_) => Err(mismatch("binary block")),
        }
    }
}

fn single(psi: &[OrthogonalMatrix]) -> Result<&OrthogonalMatrix, SchemeError> {
    match psi {
        [m] => Ok(m),
        _ => Err(mismatch("expected exactly one matrix")),
    }
}

fn check_bank(psi: &[OrthogonalMatrix], m: usize) -> Result<(), SchemeError> {
    if psi.len() != m {
        return Err(mismatch("bank size differs from the number of subchannels"));
    }
    Ok(())
}

fn mismatch(msg: &str) -> SchemeError {
    SchemeError::Model(ModelError::BlockMismatch(msg.into()))
}

/// Sign-change scheme: the n = 1 orthogonal transform applied symbol by
/// symbol. Key bit `k_t` selects `Ψ = −1` (bit 0) or `Ψ = +1` (bit 1) for
/// symbol t, so the key rate is exactly one bit per symbol.
#[derive(Debug, Clone)]
pub struct SignChangeScheme {
    system: System,
}

impl SignChangeScheme {
    pub fn new(system: System) -> Result<Self, SchemeError> {
        if system.alpha().is_none() {
            return Err(ModelError::field("scheme", "sign-change scheme needs a scalar Gaussian system").into());
        }
        if system.params.key_bits()? != system.n() as u64 {
            return Err(ModelError::field("key_rate", "sign-change scheme uses exactly one key bit per symbol").into());
        }
        Ok(SignChangeScheme { system })
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    pub fn sign(bit: bool) -> f64 {
        if bit {
            1.0
        } else {
            -1.0
        }
    }

    pub fn random_key(&self, rng: &mut impl rand::RngCore) -> Key {
        Key::random(self.system.n() as u64, rng).expect("n bits")
    }

    pub fn encode(&self, s: &Block, key: &Key) -> Result<Block, SchemeError> {
        let a = self.system.alpha().expect("checked in new");
        self.signed(s, key, a)
    }

    pub fn decode(&self, y: &Block, key: &Key, receiver: Receiver) -> Result<Block, SchemeError> {
        let b = self.system.beta(receiver).expect("checked in new");
        self.signed(y, key, b)
    }

    fn signed(&self, v: &Block, key: &Key, gain: f64) -> Result<Block, SchemeError> {
        let v = v.as_real().ok_or_else(|| mismatch("sign-change blocks are real"))?;
        if key.bits() != v.len() as u64 {
            return Err(crate::codebook::CodebookError::KeyOutOfRange {
                expected: v.len() as u64,
                got: key.bits(),
            }
            .into());
        }
        Ok(Block::Real(
            v.iter()
                .enumerate()
                .map(|(t, x)| gain * Self::sign(key.bit(t as u64)) * x)
                .collect(),
        ))
    }
}

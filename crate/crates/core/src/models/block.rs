use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{BroadcastChannel, Distortion, KeyedRng, ModelError, Receiver, SourceKind, SourceModel};

/// A length-n block of source symbols or channel symbols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Block {
    Binary(Vec<u8>),
    Real(Vec<f64>),
    /// `[j][t]`: subchannel j, time t. Every row has the same length.
    Vector(Vec<Vec<f64>>),
}

impl Block {
    pub fn len(&self) -> usize {
        match self {
            Block::Binary(v) => v.len(),
            Block::Real(v) => v.len(),
            Block::Vector(rows) => rows.first().map_or(0, Vec::len),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn components(&self) -> usize {
        match self {
            Block::Vector(rows) => rows.len(),
            _ => 1,
        }
    }

    pub fn as_binary(&self) -> Option<&[u8]> {
        match self {
            Block::Binary(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            Block::Real(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[Vec<f64>]> {
        match self {
            Block::Vector(v) => Some(v),
            _ => None,
        }
    }

    /// Per-letter distortion between two blocks of the same kind and shape.
    pub fn distortion(&self, other: &Block, measure: Distortion) -> Result<f64, ModelError> {
        if self.len() != other.len() || self.components() != other.components() {
            return Err(ModelError::BlockMismatch(format!(
                "shapes {}x{} and {}x{}",
                self.components(),
                self.len(),
                other.components(),
                other.len()
            )));
        }
        let n = self.len() as f64;
        match (self, other, measure) {
            (Block::Binary(a), Block::Binary(b), Distortion::Hamming) => {
                let d = a.iter().zip(b).filter(|(x, y)| x != y).count();
                Ok(d as f64 / n)
            }
            (Block::Real(a), Block::Real(b), Distortion::SquaredError) => Ok(sq_dist(a, b) / n),
            (Block::Vector(a), Block::Vector(b), Distortion::SumSquaredError) => {
                Ok(a.iter().zip(b).map(|(x, y)| sq_dist(x, y)).sum::<f64>() / n)
            }
            _ => Err(ModelError::BlockMismatch(format!(
                "distortion {measure:?} does not apply to these blocks"
            ))),
        }
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Draws n i.i.d. symbols from the source marginal.
pub fn sample_source_block(model: &SourceModel, n: usize, rng: &mut KeyedRng) -> Block {
    match &model.kind {
        SourceKind::Bernoulli { p } => Block::Binary(bernoulli_noise(*p, n, rng)),
        SourceKind::Gaussian { variance } => Block::Real(gaussian_noise(*variance, n, rng)),
        SourceKind::VectorGaussian { variances } => Block::Vector(
            variances.iter().map(|v| gaussian_noise(*v, n, rng)).collect(),
        ),
    }
}

/// n i.i.d. Bern(p) bits.
pub fn bernoulli_noise(p: f64, n: usize, rng: &mut impl Rng) -> Vec<u8> {
    if p <= 0.0 {
        return vec![0; n];
    }
    if p >= 1.0 {
        return vec![1; n];
    }
    (0..n).map(|_| u8::from(rng.random::<f64>() < p)).collect()
}

/// n i.i.d. N(0, variance) samples.
pub fn gaussian_noise(variance: f64, n: usize, rng: &mut impl Rng) -> Vec<f64> {
    if variance == 0.0 {
        return vec![0.0; n];
    }
    let sd = variance.sqrt();
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            sd * z
        })
        .collect()
}

/// The three channel outputs for one channel use block.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutputs {
    pub z: Block,
    pub y1: Block,
    pub y2: Block,
}

impl ChannelOutputs {
    pub fn get(&self, receiver: Receiver) -> &Block {
        match receiver {
            Receiver::Wiretapper => &self.z,
            Receiver::User1 => &self.y1,
            Receiver::User2 => &self.y2,
        }
    }
}

/// Passes `x` through the broadcast channel. Receiver `i` draws its noise
/// from `rng.fork(i)`, so the three outputs never share randomness.
pub fn transmit(
    channel: &BroadcastChannel,
    x: &Block,
    rng: &KeyedRng,
) -> Result<ChannelOutputs, ModelError> {
    let out = |r: Receiver| -> Result<Block, ModelError> {
        let mut noise = rng.fork(r.index() as u64);
        match (channel, x) {
            (BroadcastChannel::BinarySymmetric { crossover }, Block::Binary(xs)) => {
                let flips = bernoulli_noise(crossover[r.index()], xs.len(), &mut noise);
                Ok(Block::Binary(xs.iter().zip(flips).map(|(a, f)| a ^ f).collect()))
            }
            (BroadcastChannel::Awgn { noise: nv, .. }, Block::Real(xs)) => {
                Ok(Block::Real(add_noise(xs, nv[r.index()], &mut noise)))
            }
            (BroadcastChannel::VectorAwgn { noise: nv, .. }, Block::Vector(rows)) => {
                let row_noise = &nv[r.index()];
                if rows.len() != row_noise.len() {
                    return Err(ModelError::BlockMismatch(format!(
                        "{} subchannels in block, {} in channel",
                        rows.len(),
                        row_noise.len()
                    )));
                }
                Ok(Block::Vector(
                    rows.iter()
                        .zip(row_noise)
                        .map(|(row, v)| add_noise(row, *v, &mut noise))
                        .collect(),
                ))
            }
            _ => Err(ModelError::BlockMismatch(
                "channel kind does not accept this block".into(),
            )),
        }
    };
    Ok(ChannelOutputs {
        z: out(Receiver::Wiretapper)?,
        y1: out(Receiver::User1)?,
        y2: out(Receiver::User2)?,
    })
}

fn add_noise(xs: &[f64], variance: f64, rng: &mut KeyedRng) -> Vec<f64> {
    if variance == 0.0 {
        return xs.to_vec();
    }
    let normal = Normal::new(0.0, variance.sqrt()).expect("finite variance");
    xs.iter().map(|x| x + normal.sample(rng)).collect()
}

/// ρ(xⁿ) = (1/n)Σx_t²; vector blocks sum over subchannels. Binary blocks
/// are read as 0/1 reals.
pub fn empirical_power(x: &Block) -> f64 {
    let n = x.len() as f64;
    match x {
        Block::Binary(v) => v.iter().map(|&b| f64::from(b)).sum::<f64>() / n,
        Block::Real(v) => v.iter().map(|a| a * a).sum::<f64>() / n,
        Block::Vector(rows) => rows.iter().flatten().map(|a| a * a).sum::<f64>() / n,
    }
}

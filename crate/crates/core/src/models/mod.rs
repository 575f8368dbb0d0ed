//! Sources, wiretap broadcast channels, scheme parameters and the sampling
//! of source blocks and channel noise.
//!
//! Channel index 0 is always the wiretapper; indices 1 and 2 are the
//! legitimate receivers.

mod block;
mod rng;

pub use block::{
    bernoulli_noise, empirical_power, gaussian_noise, sample_source_block, transmit, Block,
    ChannelOutputs,
};
pub use rng::{label_hash, mix, splitmix64, KeyedRng};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid `{field}`: {reason}")]
    InvalidField { field: String, reason: String },
    #[error("block kind or shape mismatch: {0}")]
    BlockMismatch(String),
}

impl ModelError {
    pub(crate) fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ModelError::InvalidField {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Same error with `prefix.` prepended to the field path.
    pub fn within(self, prefix: &str) -> Self {
        match self {
            ModelError::InvalidField { field, reason } => ModelError::InvalidField {
                field: if field.is_empty() {
                    prefix.to_string()
                } else {
                    format!("{prefix}.{field}")
                },
                reason,
            },
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceKind {
    /// Bernoulli(p) on {0, 1}; p = 1/2 is the uniform binary source.
    Bernoulli { p: f64 },
    /// Scalar N(0, variance).
    Gaussian { variance: f64 },
    /// m independent components N(0, variances[j]).
    VectorGaussian { variances: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distortion {
    Hamming,
    SquaredError,
    SumSquaredError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    pub kind: SourceKind,
    pub distortion: Distortion,
}

impl SourceModel {
    pub fn new(kind: SourceKind, distortion: Distortion) -> Result<Self, ModelError> {
        let model = SourceModel { kind, distortion };
        model.validate()?;
        Ok(model)
    }

    /// Source with the distortion measure implied by its kind.
    pub fn with_default_distortion(kind: SourceKind) -> Result<Self, ModelError> {
        let distortion = match kind {
            SourceKind::Bernoulli { .. } => Distortion::Hamming,
            SourceKind::Gaussian { .. } => Distortion::SquaredError,
            SourceKind::VectorGaussian { .. } => Distortion::SumSquaredError,
        };
        Self::new(kind, distortion)
    }

    pub fn bernoulli_half() -> Self {
        Self::bernoulli(0.5).expect("valid")
    }

    pub fn bernoulli(p: f64) -> Result<Self, ModelError> {
        Self::with_default_distortion(SourceKind::Bernoulli { p })
    }

    pub fn gaussian(variance: f64) -> Result<Self, ModelError> {
        Self::with_default_distortion(SourceKind::Gaussian { variance })
    }

    pub fn vector_gaussian(variances: Vec<f64>) -> Result<Self, ModelError> {
        Self::with_default_distortion(SourceKind::VectorGaussian { variances })
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match &self.kind {
            SourceKind::Bernoulli { p } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(ModelError::field("kind.p", "probability must lie in [0, 1]"));
                }
                if self.distortion != Distortion::Hamming {
                    return Err(ModelError::field(
                        "distortion",
                        "discrete sources use the hamming distortion",
                    ));
                }
            }
            SourceKind::Gaussian { variance } => {
                if !(variance.is_finite() && *variance > 0.0) {
                    return Err(ModelError::field("kind.variance", "variance must be > 0"));
                }
                if self.distortion != Distortion::SquaredError {
                    return Err(ModelError::field(
                        "distortion",
                        "scalar Gaussian sources use squared_error",
                    ));
                }
            }
            SourceKind::VectorGaussian { variances } => {
                if variances.is_empty() {
                    return Err(ModelError::field("kind.variances", "need at least one component"));
                }
                for (j, v) in variances.iter().enumerate() {
                    if !(v.is_finite() && *v > 0.0) {
                        return Err(ModelError::field(
                            format!("kind.variances[{j}]"),
                            "variance must be > 0",
                        ));
                    }
                }
                if self.distortion != Distortion::SumSquaredError {
                    return Err(ModelError::field(
                        "distortion",
                        "vector Gaussian sources use sum_squared_error",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Scalar source variance λ (Gaussian only).
    pub fn variance(&self) -> Option<f64> {
        match self.kind {
            SourceKind::Gaussian { variance } => Some(variance),
            _ => None,
        }
    }

    pub fn components(&self) -> usize {
        match &self.kind {
            SourceKind::VectorGaussian { variances } => variances.len(),
            _ => 1,
        }
    }
}

/// Receiver index: the wiretapper observes `z`, users observe `y₁`, `y₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Receiver {
    Wiretapper,
    User1,
    User2,
}

impl Receiver {
    pub const LEGITIMATE: [Receiver; 2] = [Receiver::User1, Receiver::User2];

    pub fn index(self) -> usize {
        match self {
            Receiver::Wiretapper => 0,
            Receiver::User1 => 1,
            Receiver::User2 => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BroadcastChannel {
    /// `Y = X ⊕ V` with crossover probabilities `[p₀, p₁, p₂]`.
    BinarySymmetric { crossover: [f64; 3] },
    /// `Y = X + V` with noise variances `[N₀, N₁, N₂]` and power limit `P`.
    Awgn { noise: [f64; 3], power: f64 },
    /// Parallel AWGN: `noise[i][j]` is the variance on subchannel `j` seen by
    /// receiver `i`; `power` limits the total power across subchannels.
    VectorAwgn { noise: [Vec<f64>; 3], power: f64 },
}

impl BroadcastChannel {
    pub fn binary(p0: f64, p1: f64, p2: f64) -> Result<Self, ModelError> {
        let c = BroadcastChannel::BinarySymmetric {
            crossover: [p0, p1, p2],
        };
        c.validate()?;
        Ok(c)
    }

    pub fn awgn(n0: f64, n1: f64, n2: f64, power: f64) -> Result<Self, ModelError> {
        let c = BroadcastChannel::Awgn {
            noise: [n0, n1, n2],
            power,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn vector_awgn(noise: [Vec<f64>; 3], power: f64) -> Result<Self, ModelError> {
        let c = BroadcastChannel::VectorAwgn { noise, power };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            BroadcastChannel::BinarySymmetric { crossover } => {
                for (i, p) in crossover.iter().enumerate() {
                    if !(0.0..=0.5).contains(p) {
                        return Err(ModelError::field(
                            format!("crossover[{i}]"),
                            "crossover probability must lie in [0, 1/2]",
                        ));
                    }
                }
            }
            BroadcastChannel::Awgn { noise, power } => {
                for (i, n) in noise.iter().enumerate() {
                    if n.is_nan() || *n < 0.0 {
                        return Err(ModelError::field(format!("noise[{i}]"), "noise variance must be >= 0"));
                    }
                }
                if !(power.is_finite() && *power > 0.0) {
                    return Err(ModelError::field("power", "power limit must be > 0"));
                }
            }
            BroadcastChannel::VectorAwgn { noise, power } => {
                let m = noise[0].len();
                if m == 0 {
                    return Err(ModelError::field("noise[0]", "need at least one subchannel"));
                }
                for (i, row) in noise.iter().enumerate() {
                    if row.len() != m {
                        return Err(ModelError::field(
                            format!("noise[{i}]"),
                            format!("expected {m} subchannels, got {}", row.len()),
                        ));
                    }
                    for (j, n) in row.iter().enumerate() {
                        if n.is_nan() || *n < 0.0 {
                            return Err(ModelError::field(
                                format!("noise[{i}][{j}]"),
                                "noise variance must be >= 0",
                            ));
                        }
                    }
                }
                if !(power.is_finite() && *power > 0.0) {
                    return Err(ModelError::field("power", "power limit must be > 0"));
                }
            }
        }
        Ok(())
    }

    pub fn power_limit(&self) -> Option<f64> {
        match self {
            BroadcastChannel::BinarySymmetric { .. } => None,
            BroadcastChannel::Awgn { power, .. } | BroadcastChannel::VectorAwgn { power, .. } => {
                Some(*power)
            }
        }
    }

    /// Scalar noise variance seen by `receiver` (AWGN only).
    pub fn noise(&self, receiver: Receiver) -> Option<f64> {
        match self {
            BroadcastChannel::Awgn { noise, .. } => Some(noise[receiver.index()]),
            _ => None,
        }
    }

    pub fn crossover(&self, receiver: Receiver) -> Option<f64> {
        match self {
            BroadcastChannel::BinarySymmetric { crossover } => Some(crossover[receiver.index()]),
            _ => None,
        }
    }
}

/// Symbol-wise source-to-channel mapping applied after the keyed transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolMapping {
    /// `X = S ⊕ E`, `E ~ Bern(crossover)`.
    BinaryTestChannel { crossover: f64 },
    /// `X = αS` with `α = sqrt(P'/λ)`.
    Linear { power: f64 },
    /// `X_j = α_j S_j` with `α_j = sqrt(P_j/λ_j)`.
    VectorLinear { powers: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    /// Blocklength.
    pub n: usize,
    /// Key rate R_K in bits per symbol.
    pub key_rate: f64,
    pub mapping: SymbolMapping,
}

impl SchemeParams {
    pub fn new(n: usize, key_rate: f64, mapping: SymbolMapping) -> Result<Self, ModelError> {
        let p = SchemeParams {
            n,
            key_rate,
            mapping,
        };
        if n == 0 {
            return Err(ModelError::field("n", "blocklength must be >= 1"));
        }
        p.key_bits()?;
        Ok(p)
    }

    /// ⌈n·R_K⌉; the codebook holds `2^key_bits` entries.
    pub fn key_bits(&self) -> Result<u64, ModelError> {
        key_bits(self.n, self.key_rate)
    }
}

/// ⌈n·R_K⌉ with a small allowance so that `R_K = b/n` gives exactly `b` bits.
pub fn key_bits(n: usize, key_rate: f64) -> Result<u64, ModelError> {
    if !(key_rate.is_finite() && key_rate >= 0.0) {
        return Err(ModelError::field("key_rate", "key rate must be a finite value >= 0"));
    }
    let bits = (n as f64 * key_rate - 1e-9).ceil().max(0.0);
    if bits > u32::MAX as f64 {
        return Err(ModelError::field("key_rate", "key length overflows"));
    }
    Ok(bits as u64)
}

/// α = sqrt(P'/λ).
pub fn linear_gain(power: f64, variance: f64) -> f64 {
    (power / variance).sqrt()
}

/// β = sqrt(λP')/(P' + N); zero when nothing is transmitted and there is no
/// noise either.
pub fn mmse_gain(variance: f64, power: f64, noise: f64) -> f64 {
    let denom = power + noise;
    if denom == 0.0 {
        0.0
    } else {
        (variance * power).sqrt() / denom
    }
}

/// λN/(P' + N): MSE of the linear estimate after an AWGN channel.
pub fn linear_mmse(variance: f64, power: f64, noise: f64) -> f64 {
    let denom = power + noise;
    if denom == 0.0 {
        variance
    } else {
        variance * noise / denom
    }
}

/// A validated (source, channel, scheme parameters) triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct System {
    pub source: SourceModel,
    pub channel: BroadcastChannel,
    pub params: SchemeParams,
}

impl System {
    pub fn new(
        source: SourceModel,
        channel: BroadcastChannel,
        params: SchemeParams,
    ) -> Result<Self, ModelError> {
        source.validate().map_err(|e| e.within("source"))?;
        channel.validate().map_err(|e| e.within("channel"))?;
        let sys = System {
            source,
            channel,
            params,
        };
        sys.check_compatible()?;
        Ok(sys)
    }

    fn check_compatible(&self) -> Result<(), ModelError> {
        match (&self.source.kind, &self.channel, &self.params.mapping) {
            (
                SourceKind::Bernoulli { .. },
                BroadcastChannel::BinarySymmetric { .. },
                SymbolMapping::BinaryTestChannel { crossover },
            ) => {
                if !(0.0..=0.5).contains(crossover) {
                    return Err(ModelError::field(
                        "scheme.crossover",
                        "test-channel crossover must lie in [0, 1/2]",
                    ));
                }
            }
            (
                SourceKind::Gaussian { .. },
                BroadcastChannel::Awgn { power: limit, .. },
                SymbolMapping::Linear { power },
            ) => {
                if !(power.is_finite() && *power >= 0.0 && *power <= *limit * (1.0 + 1e-12)) {
                    return Err(ModelError::field(
                        "scheme.power",
                        format!("transmit power must lie in [0, {limit}]"),
                    ));
                }
            }
            (
                SourceKind::VectorGaussian { variances },
                BroadcastChannel::VectorAwgn { noise, power: limit },
                SymbolMapping::VectorLinear { powers },
            ) => {
                if noise[0].len() != variances.len() {
                    return Err(ModelError::field(
                        "channel.noise",
                        format!("expected {} subchannels", variances.len()),
                    ));
                }
                if powers.len() != variances.len() {
                    return Err(ModelError::field(
                        "scheme.powers",
                        format!("expected {} subchannel powers", variances.len()),
                    ));
                }
                for (j, p) in powers.iter().enumerate() {
                    if !(p.is_finite() && *p >= 0.0) {
                        return Err(ModelError::field(format!("scheme.powers[{j}]"), "power must be >= 0"));
                    }
                }
                let total: f64 = powers.iter().sum();
                if total > *limit * (1.0 + 1e-12) {
                    return Err(ModelError::field(
                        "scheme.powers",
                        format!("total power {total} exceeds the limit {limit}"),
                    ));
                }
            }
            _ => {
                return Err(ModelError::field(
                    "scheme",
                    "source, channel and symbol mapping kinds do not match",
                ))
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    /// Encoder gain α (scalar Gaussian).
    pub fn alpha(&self) -> Option<f64> {
        match (&self.source.kind, &self.params.mapping) {
            (SourceKind::Gaussian { variance }, SymbolMapping::Linear { power }) => {
                Some(linear_gain(*power, *variance))
            }
            _ => None,
        }
    }

    /// Decoder gain β_i (scalar Gaussian).
    pub fn beta(&self, receiver: Receiver) -> Option<f64> {
        match (&self.source.kind, &self.channel, &self.params.mapping) {
            (SourceKind::Gaussian { variance }, BroadcastChannel::Awgn { noise, .. }, SymbolMapping::Linear { power }) => {
                Some(mmse_gain(*variance, *power, noise[receiver.index()]))
            }
            _ => None,
        }
    }

    /// Per-subchannel encoder gains α_j.
    pub fn alphas(&self) -> Option<Vec<f64>> {
        match (&self.source.kind, &self.params.mapping) {
            (SourceKind::VectorGaussian { variances }, SymbolMapping::VectorLinear { powers }) => Some(
                variances
                    .iter()
                    .zip(powers)
                    .map(|(l, p)| linear_gain(*p, *l))
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Per-subchannel decoder gains β_{i,j}.
    pub fn betas(&self, receiver: Receiver) -> Option<Vec<f64>> {
        match (&self.source.kind, &self.channel, &self.params.mapping) {
            (
                SourceKind::VectorGaussian { variances },
                BroadcastChannel::VectorAwgn { noise, .. },
                SymbolMapping::VectorLinear { powers },
            ) => Some(
                variances
                    .iter()
                    .zip(powers)
                    .zip(&noise[receiver.index()])
                    .map(|((l, p), nn)| mmse_gain(*l, *p, *nn))
                    .collect(),
            ),
            _ => None,
        }
    }

    pub fn test_crossover(&self) -> Option<f64> {
        match self.params.mapping {
            SymbolMapping::BinaryTestChannel { crossover } => Some(crossover),
            _ => None,
        }
    }
}

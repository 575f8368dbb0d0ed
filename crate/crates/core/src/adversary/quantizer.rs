//! Random-code quantizers drawn from the optimal test channel. A fresh
//! codebook of 2^bits codewords is drawn per trial.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use super::cap::ln_cap_fraction;
use crate::models::{bernoulli_noise, KeyedRng};
use crate::stats::log_sum_exp;

/// Largest `2^bits · n` for which [`QuantizerMode::Auto`] draws the
/// codebook explicitly.
pub const EXPLICIT_CODEBOOK_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantizerMode {
    /// Explicit below [`EXPLICIT_CODEBOOK_LIMIT`], analytic above.
    #[default]
    Auto,
    /// Exact per-codeword hit probability h; success is drawn with
    /// probability 1 − (1 − h)^M, which has the same law as searching an
    /// i.i.d. codebook.
    Analytic,
    Explicit,
}

impl QuantizerMode {
    fn explicit(self, bits: u64, n: usize) -> bool {
        match self {
            QuantizerMode::Analytic => false,
            QuantizerMode::Explicit => true,
            QuantizerMode::Auto => bits < 40 && (1u64 << bits).saturating_mul(n as u64) <= EXPLICIT_CODEBOOK_LIMIT,
        }
    }
}

/// P[at least one of M = 2^bits independent codewords hits], given the
/// per-codeword hit probability `exp(ln_h)`.
pub(crate) fn any_hit_probability(ln_h: f64, bits: u64) -> f64 {
    if ln_h == f64::NEG_INFINITY {
        return 0.0;
    }
    if ln_h >= 0.0 {
        return 1.0;
    }
    // ln(−ln(1 − h)); −ln(1 − h) = h to double precision once h < e^−40.
    let ln_v = if ln_h < -40.0 {
        ln_h
    } else {
        (-(-ln_h.exp()).ln_1p()).ln()
    };
    let x = bits as f64 * std::f64::consts::LN_2 + ln_v;
    if x > 700.0 {
        1.0
    } else {
        -(-x.exp()).exp_m1()
    }
}

/// Codeword bias u of the Hamming test channel for a Bern(p) source at
/// distortion d: the output law of the R-D achieving channel.
pub(crate) fn binary_codeword_bias(p: f64, d: f64) -> f64 {
    if p > 0.5 {
        return 1.0 - binary_codeword_bias(1.0 - p, d);
    }
    if d >= p {
        0.0
    } else {
        (p - d) / (1.0 - 2.0 * d)
    }
}

/// Codebook of i.i.d. Bern(u) words; hit means Hamming distance ≤ budget.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BinaryQuantizer {
    pub n: usize,
    pub bias: f64,
    pub bits: u64,
    pub budget: usize,
}

impl BinaryQuantizer {
    /// ln P[d_H(w, c) ≤ budget] for one codeword c against a word of
    /// weight `a`: the distance is Bin(a, 1−u) + Bin(n−a, u).
    pub(crate) fn ln_hit(&self, a: usize) -> f64 {
        let (n, k, u) = (self.n, self.budget, self.bias);
        if u <= 0.0 {
            return if a <= k { 0.0 } else { f64::NEG_INFINITY };
        }
        if u >= 1.0 {
            return if n - a <= k { 0.0 } else { f64::NEG_INFINITY };
        }
        let (lu, lv) = (u.ln(), (-u).ln_1p());
        let b = n - a;
        // Prefix log-CDF of Y ~ Bin(b, u).
        let mut cdf_y = Vec::with_capacity(k.min(b) + 1);
        let mut acc = f64::NEG_INFINITY;
        for y in 0..=k.min(b) {
            let lp = ln_binomial(b as u64, y as u64) + y as f64 * lu + (b - y) as f64 * lv;
            acc = log_sum_exp([acc, lp]);
            cdf_y.push(acc);
        }
        let terms = (0..=k.min(a)).map(|x| {
            let lp = ln_binomial(a as u64, x as u64) + x as f64 * lv + (a - x) as f64 * lu;
            lp + cdf_y[(k - x).min(b)]
        });
        log_sum_exp(terms).min(0.0)
    }

    pub(crate) fn covers(&self, word: &[u8], mode: QuantizerMode, rng: &mut KeyedRng) -> bool {
        if mode.explicit(self.bits, self.n) {
            (0..1u64 << self.bits).any(|_| {
                let c = bernoulli_noise(self.bias, self.n, rng);
                word.iter().zip(&c).filter(|(a, b)| a != b).count() <= self.budget
            })
        } else {
            let a = word.iter().filter(|&&b| b != 0).count();
            rng.random::<f64>() < any_hit_probability(self.ln_hit(a), self.bits)
        }
    }
}

/// Codewords uniform on the sphere of radius √(n(σ² − D₀))⁺; hit means
/// squared error ≤ nD₀.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SphereQuantizer {
    pub n: usize,
    pub radius: f64,
    pub bits: u64,
    pub d0: f64,
}

impl SphereQuantizer {
    pub(crate) fn new(n: usize, variance: f64, d0: f64, bits: u64) -> Self {
        SphereQuantizer {
            n,
            radius: (n as f64 * (variance - d0).max(0.0)).sqrt(),
            bits,
            d0,
        }
    }

    /// ln P[‖w − c‖² ≤ nD₀] for one codeword, given ‖w‖.
    pub(crate) fn ln_hit(&self, norm: f64) -> f64 {
        let budget = self.n as f64 * self.d0;
        let (r, rho) = (norm, self.radius);
        if rho == 0.0 || r == 0.0 {
            return if r * r + rho * rho <= budget { 0.0 } else { f64::NEG_INFINITY };
        }
        let cos = (r * r + rho * rho - budget) / (2.0 * r * rho);
        ln_cap_fraction(self.n, cos)
    }

    pub(crate) fn covers(&self, word: &[f64], mode: QuantizerMode, rng: &mut KeyedRng) -> bool {
        let budget = self.n as f64 * self.d0;
        if mode.explicit(self.bits, self.n) && self.radius > 0.0 {
            (0..1u64 << self.bits).any(|_| {
                let g: Vec<f64> = (0..self.n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let scale = self.radius / g.iter().map(|x| x * x).sum::<f64>().sqrt();
                word.iter().zip(&g).map(|(w, x)| (w - scale * x).powi(2)).sum::<f64>() <= budget
            })
        } else {
            let norm = word.iter().map(|x| x * x).sum::<f64>().sqrt();
            rng.random::<f64>() < any_hit_probability(self.ln_hit(norm), self.bits)
        }
    }
}

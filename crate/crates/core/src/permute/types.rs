use std::collections::HashMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Permutation;
use crate::models::KeyedRng;
use crate::stats::{chi_square_uniform, log2_biguint, ChiSquareResult};

/// Largest type class [`enumerate_type_class`] will list.
pub const MAX_ENUMERATED_CLASS: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TypeError {
    #[error("type class has {size} members, enumeration limit is {limit}")]
    ClassTooLarge { size: String, limit: u64 },
}

/// Symbol counts of a sequence over `{0, …, counts.len() − 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SequenceType {
    counts: Vec<u64>,
}

impl SequenceType {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        SequenceType { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn alphabet(&self) -> usize {
        self.counts.len()
    }

    pub fn n(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn empirical(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// H(T) in bits.
    pub fn entropy(&self) -> f64 {
        crate::rd::entropy(&self.empirical())
    }

    /// Type of the concatenation.
    pub fn add(&self, other: &SequenceType) -> SequenceType {
        let len = self.alphabet().max(other.alphabet());
        let counts = (0..len)
            .map(|a| self.counts.get(a).copied().unwrap_or(0) + other.counts.get(a).copied().unwrap_or(0))
            .collect();
        SequenceType { counts }
    }
}

/// Exact type of `s` over an alphabet of at least `alphabet` letters (grown
/// to cover the largest symbol present).
pub fn type_of(s: &[u8], alphabet: usize) -> SequenceType {
    let len = s.iter().map(|&x| x as usize + 1).max().unwrap_or(0).max(alphabet);
    let mut counts = vec![0u64; len];
    for &x in s {
        counts[x as usize] += 1;
    }
    SequenceType { counts }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeClassSize {
    /// n!/∏ c_a!
    pub exact: BigUint,
    pub log2_exact: f64,
    /// nH(T) − |𝒮| log₂(n+1)
    pub log2_lower: f64,
    /// nH(T)
    pub log2_upper: f64,
}

impl TypeClassSize {
    pub fn lower(&self) -> f64 {
        self.log2_lower.exp2()
    }

    pub fn upper(&self) -> f64 {
        self.log2_upper.exp2()
    }

    pub fn within_bounds(&self) -> bool {
        let slack = 1e-9 * self.log2_upper.abs().max(1.0);
        self.log2_exact >= self.log2_lower - slack && self.log2_exact <= self.log2_upper + slack
    }
}

pub fn type_class_size(t: &SequenceType) -> TypeClassSize {
    let mut exact = BigUint::from(1u32);
    let mut m = 0u64;
    for &c in t.counts() {
        for j in 1..=c {
            m += 1;
            exact = exact * m / j;
        }
    }
    let n = t.n() as f64;
    let nh = n * t.entropy();
    TypeClassSize {
        log2_exact: log2_biguint(&exact),
        log2_lower: nh - t.alphabet() as f64 * (n + 1.0).log2(),
        log2_upper: nh,
        exact,
    }
}

/// All sequences of the given type, in lexicographic order.
pub fn enumerate_type_class(t: &SequenceType, limit: u64) -> Result<Vec<Vec<u8>>, TypeError> {
    let size = type_class_size(t).exact;
    if size > BigUint::from(limit) {
        return Err(TypeError::ClassTooLarge {
            size: size.to_string(),
            limit,
        });
    }
    let mut current: Vec<u8> = t
        .counts()
        .iter()
        .enumerate()
        .flat_map(|(a, &c)| std::iter::repeat_n(a as u8, c as usize))
        .collect();
    let mut out = vec![current.clone()];
    while next_permutation(&mut current) {
        out.push(current.clone());
    }
    Ok(out)
}

fn next_permutation(v: &mut [u8]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub class_size: u64,
    /// Counts per class member, in lexicographic member order.
    pub counts: Vec<u64>,
    pub samples: u64,
    pub chi_square: ChiSquareResult,
}

impl UniformityReport {
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.samples as f64)
            .collect()
    }
}

/// Applies `samples` permutations drawn by `sampler` to `s` and tests the
/// outputs for uniformity over the type class of `s`. Pass
/// [`Permutation::random`] for the scheme's own sampler.
pub fn uniformity_test<F>(
    s: &[u8],
    samples: u64,
    rng: &KeyedRng,
    sampler: F,
) -> Result<UniformityReport, TypeError>
where
    F: Fn(usize, &mut KeyedRng) -> Permutation + Sync,
{
    let members = enumerate_type_class(&type_of(s, 0), MAX_ENUMERATED_CLASS)?;
    let index: HashMap<&[u8], usize> = members
        .iter()
        .enumerate()
        .map(|(i, m)| (m.as_slice(), i))
        .collect();
    const CHUNK: u64 = 1 << 14;
    let chunks = samples.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = vec![0u64; members.len()];
            let mut r = rng.fork(c);
            let todo = CHUNK.min(samples - c * CHUNK);
            for _ in 0..todo {
                let psi = sampler(s.len(), &mut r);
                let out = psi.apply(s).expect("sampler returns length-n permutations");
                local[index[out.as_slice()]] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; members.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(UniformityReport {
        class_size: members.len() as u64,
        chi_square: chi_square_uniform(&counts),
        counts,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_examples() {
        assert_eq!(type_of(&[0, 0, 1], 2).counts(), &[2, 1]);
        let a = type_of(&[0, 1, 1], 2);
        let b = type_of(&[2], 2);
        assert_eq!(a.add(&b).counts(), &[1, 2, 1]);
    }

    #[test]
    fn class_sizes() {
        let t = SequenceType::from_counts(vec![2, 2]);
        assert_eq!(type_class_size(&t).exact, BigUint::from(6u32));
        let t = SequenceType::from_counts(vec![5]);
        assert_eq!(type_class_size(&t).exact, BigUint::from(1u32));
        let t = SequenceType::from_counts(vec![3, 3]);
        let size = type_class_size(&t);
        assert_eq!(size.exact, BigUint::from(20u32));
        assert!((size.lower() - 64.0 / 49.0).abs() < 1e-9);
        assert!((size.upper() - 64.0).abs() < 1e-9);
        assert!(size.within_bounds());
    }

    #[test]
    fn large_class_log() {
        let t = SequenceType::from_counts(vec![500, 500]);
        let size = type_class_size(&t);
        assert!(size.within_bounds());
        // log2 C(1000, 500) ≈ 994.69
        assert!((size.log2_exact - 994.69).abs() < 0.01, "{}", size.log2_exact);
    }

    #[test]
    fn enumeration() {
        let t = SequenceType::from_counts(vec![2, 1]);
        let all = enumerate_type_class(&t, 10).unwrap();
        assert_eq!(all, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        let big = SequenceType::from_counts(vec![20, 20]);
        assert!(enumerate_type_class(&big, MAX_ENUMERATED_CLASS).is_err());
    }

    #[test]
    fn constant_sequence_trivially_uniform() {
        let r = uniformity_test(&[1, 1, 1, 1], 1000, &KeyedRng::new(1, 0), Permutation::random).unwrap();
        assert_eq!(r.class_size, 1);
        assert_eq!(r.chi_square.p_value, 1.0);
    }

    #[test]
    fn three_member_class() {
        let r = uniformity_test(&[0, 0, 1], 300_000, &KeyedRng::new(2, 0), Permutation::random).unwrap();
        for f in r.frequencies() {
            assert!((f - 1.0 / 3.0).abs() < 0.005, "{f}");
        }
    }

    #[test]
    fn biased_sampler_detected() {
        // Swaps only the first two positions: never moves the last symbol.
        let biased = |n: usize, r: &mut KeyedRng| {
            use rand::Rng;
            let mut f: Vec<usize> = (0..n).collect();
            if r.random::<bool>() {
                f.swap(0, 1);
            }
            Permutation::new(f).unwrap()
        };
        let r = uniformity_test(&[0, 0, 0, 1, 1, 1], 100_000, &KeyedRng::new(3, 0), biased).unwrap();
        assert!(r.chi_square.p_value < 1e-3);
    }
}

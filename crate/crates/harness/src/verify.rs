//! The statistical lemma suite: permutation uniformity, type-class
//! counting, Haar invariance, spherical caps, d-tilted identities and
//! exact exponent bounds. Statistical checks use the p-floor
//! [`tol::P_FLOOR`] and are pinned to the master seed.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use uncoded_secrecy::adversary::spherical_cap_ratio;
use uncoded_secrecy::models::{label_hash, mix, KeyedRng};
use uncoded_secrecy::ortho::{haar_invariance_test, OrthogonalMatrix};
use uncoded_secrecy::permute::{type_class_size, type_of, uniformity_test, Permutation, SequenceType};
use uncoded_secrecy::rd::{
    binary_entropy, conditional_dtilted, dtilted_information, DiscreteDistribution, DistortionMatrix,
    JointDistribution,
};
use uncoded_secrecy::rd::binary_exponent_check;
use uncoded_secrecy::stats::Check;
use uncoded_secrecy::tol;

use crate::output::write_json;
use crate::{HarnessError, SCHEMA_VERSION};

pub const UNIFORMITY_SAMPLES: u64 = 1_000_000;
pub const TYPE_INVARIANCE_PAIRS: u64 = 1_000_000;
pub const TYPE_CLASS_MAX_N: usize = 12;
pub const HAAR_ANGLE_SAMPLES: u64 = 100_000;
pub const HAAR_MOMENT_SAMPLES: u64 = 20_000;
pub const HAAR_RESIDUAL_SIZES: [usize; 6] = [2, 8, 32, 128, 256, 512];
/// E[ȷ] vs R(D) agreement.
pub const DTILTED_TOL: f64 = 1e-3;
pub const CAP_EXACT_TOL: f64 = 1e-10;
pub const CAP_GAP_TOL: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Permutation,
    Types,
    Haar,
    Cap,
    Dtilted,
    Exponent,
}

impl Group {
    pub const ALL: [Group; 6] = [
        Group::Permutation,
        Group::Types,
        Group::Haar,
        Group::Cap,
        Group::Dtilted,
        Group::Exponent,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub verdict: Verdict,
}

impl From<Check> for CheckRow {
    fn from(c: Check) -> Self {
        CheckRow {
            name: c.name,
            statistic: c.statistic,
            threshold: c.threshold,
            verdict: if c.passed { Verdict::Pass } else { Verdict::Fail },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckRow>,
}

fn group_rng(seed: u64, label: &str) -> KeyedRng {
    KeyedRng::new(mix(seed, label_hash(label)), 0)
}

/// Chi-square uniformity of ψ(s) over the 20-member class of type (3, 3)
/// at n = 6, with `sampler` drawing ψ.
pub fn permutation_uniformity<F>(seed: u64, samples: u64, sampler: F) -> Result<Check, HarnessError>
where
    F: Fn(usize, &mut KeyedRng) -> Permutation + Sync,
{
    let r = uniformity_test(&[0, 0, 0, 1, 1, 1], samples, &group_rng(seed, "permutation"), sampler)?;
    Ok(Check::at_least("permutation_uniformity_p", r.chi_square.p_value, tol::P_FLOOR))
}

/// Number of random (ψ, s) pairs whose type changes under ψ.
pub fn type_invariance_failures(seed: u64, pairs: u64) -> Result<u64, HarnessError> {
    let rng = group_rng(seed, "type_invariance");
    const CHUNK: u64 = 1 << 14;
    let failures = (0..pairs.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| -> Result<u64, HarnessError> {
            use rand::Rng;
            let mut r = rng.fork(c);
            let mut bad = 0;
            for _ in 0..CHUNK.min(pairs - c * CHUNK) {
                let n = r.random_range(1..=64usize);
                let alphabet = r.random_range(2..=4u8);
                let s: Vec<u8> = (0..n).map(|_| r.random_range(0..alphabet)).collect();
                let psi = Permutation::random(n, &mut r);
                let out = psi.apply(&s)?;
                bad += u64::from(type_of(&out, alphabet as usize) != type_of(&s, alphabet as usize));
            }
            Ok(bad)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(failures.into_iter().sum())
}

/// Binary types with n ≤ `max_n` whose class size disagrees with a count
/// over all 2ⁿ sequences, or falls outside the 2^{nH}/(n+1)^{|X|} bounds.
pub fn type_class_mismatches(max_n: usize) -> u64 {
    let mut bad = 0;
    for n in 1..=max_n {
        let mut by_weight = vec![0u64; n + 1];
        for x in 0u32..1 << n {
            by_weight[x.count_ones() as usize] += 1;
        }
        for (k, &count) in by_weight.iter().enumerate() {
            let size = type_class_size(&SequenceType::from_counts(vec![(n - k) as u64, k as u64]));
            if size.exact != count.into() || !size.within_bounds() {
                bad += 1;
            }
        }
    }
    bad
}

fn haar_checks(seed: u64) -> Result<Vec<Check>, HarnessError> {
    let mut checks = Vec::new();
    let circle = haar_invariance_test(2, HAAR_ANGLE_SAMPLES, &group_rng(seed, "haar2"))?;
    for c in circle.checks {
        checks.push(Check { name: format!("haar_n2_{}", c.name), ..c });
    }
    let moments = haar_invariance_test(16, HAAR_MOMENT_SAMPLES, &group_rng(seed, "haar16"))?;
    for c in moments.checks {
        checks.push(Check { name: format!("haar_n16_{}", c.name), ..c });
    }
    let rng = group_rng(seed, "haar_residual");
    let residuals = HAAR_RESIDUAL_SIZES
        .par_iter()
        .enumerate()
        .map(|(i, &n)| Ok(OrthogonalMatrix::haar(n, &mut rng.fork(i as u64))?.orthogonality_residual()))
        .collect::<Result<Vec<f64>, HarnessError>>()?;
    let worst = residuals.into_iter().fold(0.0, f64::max);
    checks.push(Check::at_most("haar_orthogonality_residual", worst, tol::ORTHOGONALITY));
    Ok(checks)
}

fn cap_checks() -> Result<Vec<Check>, HarnessError> {
    let mut err: f64 = 0.0;
    for i in 1..=32 {
        let theta = std::f64::consts::FRAC_PI_2 * i as f64 / 32.0;
        let r = spherical_cap_ratio(3, theta)?;
        err = err.max((r.exact - (1.0 - theta.cos()) / 2.0).abs());
    }
    let gap = spherical_cap_ratio(200, std::f64::consts::FRAC_PI_4)?.relative_gap();
    let half = spherical_cap_ratio(200, std::f64::consts::FRAC_PI_2)?.exact;
    Ok(vec![
        Check::at_most("cap_n3_closed_form_error", err, CAP_EXACT_TOL),
        Check::at_most("cap_n200_relative_gap", gap, CAP_GAP_TOL),
        Check::at_most("cap_half_sphere_error", (half - 0.5).abs(), 1e-12),
    ])
}

fn dtilted_checks() -> Result<Vec<Check>, HarnessError> {
    let hamming = DistortionMatrix::hamming(2);
    let mut worst: f64 = 0.0;
    for (p, d) in [(0.5, 0.11), (0.3, 0.1), (0.2, 0.05), (0.5, 0.3)] {
        let source = DiscreteDistribution::bernoulli(p)?;
        let j = dtilted_information(&source, &hamming, d)?;
        let mean = (1.0 - p) * j[0] + p * j[1];
        worst = worst.max((mean - (binary_entropy(p)? - binary_entropy(d)?)).abs());
    }
    let mut worst_cond: f64 = 0.0;
    for (q, d) in [(0.1, 0.05), (0.25, 0.1), (0.4, 0.2)] {
        let c = conditional_dtilted(&JointDistribution::doubly_symmetric_binary(q), &hamming, d)?;
        worst_cond = worst_cond.max((c.mean - (binary_entropy(q)? - binary_entropy(d)?)).abs());
    }
    Ok(vec![
        Check::at_most("dtilted_mean_vs_rd", worst, DTILTED_TOL),
        Check::at_most("conditional_dtilted_mean_vs_rd", worst_cond, DTILTED_TOL),
    ])
}

fn exponent_checks() -> Result<Vec<Check>, HarnessError> {
    let mut margin = f64::INFINITY;
    for n in 10..=20 {
        let c = binary_exponent_check(n, 0.11, 2.0)?;
        margin = margin.min(c.exponent - c.bound);
    }
    Ok(vec![Check::at_least("exponent_bound_margin", margin, 0.0)])
}

pub fn run_group(group: Group, seed: u64) -> Result<Vec<Check>, HarnessError> {
    match group {
        Group::Permutation => Ok(vec![permutation_uniformity(seed, UNIFORMITY_SAMPLES, Permutation::random)?]),
        Group::Types => Ok(vec![
            Check::at_most(
                "type_invariance_failures",
                type_invariance_failures(seed, TYPE_INVARIANCE_PAIRS)? as f64,
                0.0,
            ),
            Check::at_most("type_class_mismatches", type_class_mismatches(TYPE_CLASS_MAX_N) as f64, 0.0),
        ]),
        Group::Haar => haar_checks(seed),
        Group::Cap => cap_checks(),
        Group::Dtilted => dtilted_checks(),
        Group::Exponent => exponent_checks(),
    }
}

pub fn verify_lemmas(groups: &[Group], seed: u64) -> Result<VerifyReport, HarnessError> {
    let mut checks = Vec::new();
    for &g in groups {
        checks.extend(run_group(g, seed)?.into_iter().map(CheckRow::from));
    }
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        seed,
        passed: checks.iter().all(|c| c.verdict == Verdict::Pass),
        checks,
    })
}

pub fn write_report(report: &VerifyReport, dir: &Path) -> Result<std::path::PathBuf, HarnessError> {
    crate::output::ensure_dir(dir)?;
    let path = dir.join("verify.json");
    write_json(&path, report)?;
    Ok(path)
}

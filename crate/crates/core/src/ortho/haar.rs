use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::OrthogonalMatrix;
use crate::codebook::CodebookError;
use crate::models::KeyedRng;
use crate::stats::{chi_square_uniform, ks_two_sample, normal_quantile, Check, Moments};
use crate::tol;

const ANGLE_BINS: usize = 32;
const CHUNK: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarReport {
    pub n: usize,
    pub samples: u64,
    /// Empirical E[(Ψs)_i²] per coordinate.
    pub second_moments: Vec<f64>,
    pub checks: Vec<Check>,
}

impl HaarReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Default)]
struct Acc {
    first: Vec<Moments>,
    second: Vec<Moments>,
    proj_a: Vec<f64>,
    proj_b: Vec<f64>,
    isometry: f64,
    angles: Vec<u64>,
}

/// Draws `samples` Haar matrices and checks that Ψs is uniform on the sphere
/// for a fixed unit vector s: coordinate means, coordinate second moments
/// (1/n), equality in law of two projections (KS, disjoint halves of the
/// sample), isometry, and for n = 2 uniformity of the angle.
pub fn haar_invariance_test(
    n: usize,
    samples: u64,
    rng: &KeyedRng,
) -> Result<HaarReport, CodebookError> {
    assert!(n >= 2, "the sphere test needs n >= 2");
    let norm = ((1..=n).map(|i| (i * i) as f64).sum::<f64>()).sqrt();
    let s: Vec<f64> = (1..=n).map(|i| i as f64 / norm).collect();
    let u_b = 1.0 / (n as f64).sqrt();
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Acc> = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<Acc, CodebookError> {
            let mut r = rng.fork(c);
            let mut acc = Acc {
                first: vec![Moments::default(); n],
                second: vec![Moments::default(); n],
                angles: vec![0; ANGLE_BINS],
                ..Acc::default()
            };
            for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let psi = OrthogonalMatrix::haar(n, &mut r)?;
                let v = psi.apply(&s)?;
                for (k, x) in v.iter().enumerate() {
                    acc.first[k].push(*x);
                    acc.second[k].push(x * x);
                }
                let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                acc.isometry = acc.isometry.max((len - 1.0).abs());
                if i % 2 == 0 {
                    acc.proj_a.push(v[0]);
                } else {
                    acc.proj_b.push(v.iter().sum::<f64>() * u_b);
                }
                if n == 2 {
                    let theta = v[1].atan2(v[0]).rem_euclid(std::f64::consts::TAU);
                    let bin = ((theta / std::f64::consts::TAU) * ANGLE_BINS as f64) as usize;
                    acc.angles[bin.min(ANGLE_BINS - 1)] += 1;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_, _>>()?;

    let mut total = Acc {
        first: vec![Moments::default(); n],
        second: vec![Moments::default(); n],
        angles: vec![0; ANGLE_BINS],
        ..Acc::default()
    };
    for p in parts {
        for k in 0..n {
            total.first[k].merge(&p.first[k]);
            total.second[k].merge(&p.second[k]);
        }
        total.proj_a.extend(p.proj_a);
        total.proj_b.extend(p.proj_b);
        total.isometry = total.isometry.max(p.isometry);
        total.angles.iter_mut().zip(p.angles).for_each(|(a, b)| *a += b);
    }

    // Bonferroni over the n coordinates at the global p-floor.
    let z_crit = normal_quantile(1.0 - tol::P_FLOOR / (2.0 * n as f64));
    let z_mean = total
        .first
        .iter()
        .map(|m| m.mean.abs() / m.std_error())
        .fold(0.0, f64::max);
    let target = 1.0 / n as f64;
    let z_second = total
        .second
        .iter()
        .map(|m| (m.mean - target).abs() / m.std_error())
        .fold(0.0, f64::max);
    let ks = ks_two_sample(&total.proj_a, &total.proj_b);
    let mut checks = vec![
        Check::at_most("coordinate_mean_z", z_mean, z_crit),
        Check::at_most("coordinate_second_moment_z", z_second, z_crit),
        Check::at_least("projection_ks_p", ks.p_value, tol::P_FLOOR),
        Check::at_most("isometry", total.isometry, tol::ISOMETRY),
    ];
    if n == 2 {
        let chi = chi_square_uniform(&total.angles);
        checks.push(Check::at_least("angle_uniformity_p", chi.p_value, tol::P_FLOOR));
    }
    Ok(HaarReport {
        n,
        samples,
        second_moments: total.second.iter().map(|m| m.mean).collect(),
        checks,
    })
}

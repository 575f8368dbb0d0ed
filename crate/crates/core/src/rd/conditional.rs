use serde::{Deserialize, Serialize};

use super::ba::{bisect_slope, distortion_range, point_mass, solve_at_slope, SlopeSolution};
use super::{blahut_arimoto_rd, DiscreteDistribution, DistortionMatrix, RdError};
use crate::stats::log_sum_exp;
use crate::tol;

/// Joint pmf `p[s][z]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    p: Vec<Vec<f64>>,
}

impl JointDistribution {
    pub fn new(p: Vec<Vec<f64>>) -> Result<Self, RdError> {
        let cols = p.first().map_or(0, Vec::len);
        if p.is_empty() || cols == 0 || p.iter().any(|r| r.len() != cols) {
            return Err(RdError::InvalidDistribution("joint pmf must be a nonempty rectangle".into()));
        }
        if p.iter().flatten().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(RdError::InvalidDistribution("joint pmf has a negative entry".into()));
        }
        let sum: f64 = p.iter().flatten().sum();
        if (sum - 1.0).abs() > tol::PROBABILITY_SUM {
            return Err(RdError::InvalidDistribution(format!("joint pmf sums to {sum}")));
        }
        Ok(JointDistribution { p })
    }

    pub fn independent(ps: &DiscreteDistribution, pz: &DiscreteDistribution) -> Self {
        JointDistribution {
            p: ps
                .probs()
                .iter()
                .map(|a| pz.probs().iter().map(|b| a * b).collect())
                .collect(),
        }
    }

    /// Z = S.
    pub fn perfect(ps: &DiscreteDistribution) -> Self {
        let n = ps.len();
        JointDistribution {
            p: (0..n)
                .map(|a| (0..n).map(|b| if a == b { ps.probs()[a] } else { 0.0 }).collect())
                .collect(),
        }
    }

    /// Uniform S observed through a BSC(q).
    pub fn doubly_symmetric_binary(q: f64) -> Self {
        JointDistribution {
            p: vec![
                vec![0.5 * (1.0 - q), 0.5 * q],
                vec![0.5 * q, 0.5 * (1.0 - q)],
            ],
        }
    }

    pub fn source_letters(&self) -> usize {
        self.p.len()
    }

    pub fn side_letters(&self) -> usize {
        self.p[0].len()
    }

    pub fn marginal_z(&self) -> Vec<f64> {
        (0..self.side_letters())
            .map(|z| self.p.iter().map(|r| r[z]).sum())
            .collect()
    }

    /// P(s | z), or `None` when P(z) = 0.
    pub fn conditional(&self, z: usize) -> Option<Vec<f64>> {
        let pz: f64 = self.p.iter().map(|r| r[z]).sum();
        (pz > 0.0).then(|| self.p.iter().map(|r| r[z] / pz).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalRd {
    pub distortion: f64,
    pub rate: f64,
    /// Common slope in bits per unit distortion.
    pub slope: f64,
    /// Per side letter: (P(z), allotted distortion b(z), R_{S|Z=z}(b(z))).
    pub allocation: Vec<(f64, f64, f64)>,
}

struct Solved {
    s: f64,
    pz: Vec<f64>,
    parts: Vec<Option<SlopeSolution>>,
}

fn solve_conditional(joint: &JointDistribution, d: &DistortionMatrix, target: f64) -> Result<Solved, RdError> {
    if d.rows() != joint.source_letters() {
        return Err(RdError::InvalidDistribution("distortion matrix rows differ from the source alphabet".into()));
    }
    if !(target >= 0.0) {
        return Err(RdError::OutOfRange {
            name: "D",
            value: target,
            reason: "must be >= 0",
        });
    }
    let pz = joint.marginal_z();
    let conds: Vec<Option<Vec<f64>>> = (0..pz.len()).map(|z| joint.conditional(z)).collect();
    let ranges: Vec<Option<(f64, f64, usize)>> = conds
        .iter()
        .map(|c| c.as_ref().map(|p| distortion_range(p, d)))
        .collect();
    let weighted = |f: fn(&(f64, f64, usize)) -> f64| -> f64 {
        ranges
            .iter()
            .zip(&pz)
            .filter_map(|(r, w)| r.as_ref().map(|r| w * f(r)))
            .sum()
    };
    let d_min = weighted(|r| r.0);
    let d_max = weighted(|r| r.1);
    if target < d_min - 1e-12 {
        return Err(RdError::BelowMinimum {
            requested: target,
            d_min,
        });
    }
    let at_slope = |s: f64| -> Result<(f64, Vec<Option<SlopeSolution>>), RdError> {
        let parts = conds
            .iter()
            .zip(&ranges)
            .map(|(c, r)| match (c, r) {
                (Some(p), Some((lo, hi, best))) => Ok(Some(if hi - lo < 1e-15 || s == 0.0 {
                    point_mass(p, d, *best)
                } else {
                    solve_at_slope(p, d, s)?
                })),
                _ => Ok(None),
            })
            .collect::<Result<Vec<_>, RdError>>()?;
        let total = parts
            .iter()
            .zip(&pz)
            .filter_map(|(sol, w)| sol.as_ref().map(|s| w * s.distortion))
            .sum();
        Ok((total, parts))
    };
    let (s, parts) = if target >= d_max {
        (0.0, at_slope(0.0)?.1)
    } else if target <= d_min + 1e-13 {
        (f64::INFINITY, at_slope(f64::INFINITY)?.1)
    } else {
        bisect_slope(target, at_slope)?
    };
    Ok(Solved { s, pz, parts })
}

/// R_{S|Z}(D): the per-letter conditional curves R_{S|Z=z} are combined at a
/// common Lagrange slope, which is optimal by convexity.
pub fn conditional_rd(joint: &JointDistribution, d: &DistortionMatrix, target: f64) -> Result<ConditionalRd, RdError> {
    let solved = solve_conditional(joint, d, target)?;
    let allocation: Vec<(f64, f64, f64)> = solved
        .parts
        .iter()
        .zip(&solved.pz)
        .map(|(sol, &w)| match sol {
            Some(s) => (w, s.distortion, s.rate),
            None => (0.0, 0.0, 0.0),
        })
        .collect();
    Ok(ConditionalRd {
        distortion: target,
        rate: allocation.iter().map(|(w, _, r)| w * r).sum(),
        slope: solved.s * std::f64::consts::LOG2_E,
        allocation,
    })
}

/// ȷ(a) = −log₂ Σ_b q(b) exp(s(D − d(a, b))).
fn tilted(q: &[f64], d: &DistortionMatrix, s: f64, level: f64, a: usize) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    let terms = q
        .iter()
        .enumerate()
        .filter(|(_, qb)| **qb > 0.0)
        .map(|(b, qb)| qb.ln() + s * (level - d.get(a, b)));
    -log_sum_exp(terms) * std::f64::consts::LOG2_E
}

/// ȷ_S(s, D) for every source letter; requires D > D_min.
pub fn dtilted_information(
    source: &DiscreteDistribution,
    d: &DistortionMatrix,
    target: f64,
) -> Result<Vec<f64>, RdError> {
    let (d_min, _, _) = distortion_range(source.probs(), d);
    if target <= d_min {
        return Err(RdError::BelowMinimum {
            requested: target,
            d_min,
        });
    }
    let sol = blahut_arimoto_rd(source, d, target)?;
    Ok((0..source.len())
        .map(|a| tilted(&sol.output, d, sol.slope_nats, target, a))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalDtilted {
    /// b*(z): distortion of the optimal conditional reconstruction.
    pub b_star: Vec<f64>,
    /// ȷ_{S|Z=z}(s, b*(z)) as `table[z][s]`.
    pub table: Vec<Vec<f64>>,
    /// Σ_z P(z) E[ȷ_{S|Z=z}(S, b*(z)) | Z = z].
    pub mean: f64,
    pub slope: f64,
}

pub fn conditional_dtilted(
    joint: &JointDistribution,
    d: &DistortionMatrix,
    target: f64,
) -> Result<ConditionalDtilted, RdError> {
    let solved = solve_conditional(joint, d, target)?;
    let mut b_star = Vec::new();
    let mut table = Vec::new();
    let mut mean = 0.0;
    for (z, (sol, &w)) in solved.parts.iter().zip(&solved.pz).enumerate() {
        match sol {
            Some(sol) => {
                let row: Vec<f64> = (0..joint.source_letters())
                    .map(|a| tilted(&sol.output, d, solved.s, sol.distortion, a))
                    .collect();
                let cond = joint.conditional(z).expect("P(z) > 0");
                mean += w * cond
                    .iter()
                    .zip(&row)
                    .filter(|(p, _)| **p > 0.0)
                    .map(|(p, j)| p * j)
                    .sum::<f64>();
                b_star.push(sol.distortion);
                table.push(row);
            }
            None => {
                b_star.push(0.0);
                table.push(vec![0.0; joint.source_letters()]);
            }
        }
    }
    Ok(ConditionalDtilted {
        b_star,
        table,
        mean,
        slope: solved.s * std::f64::consts::LOG2_E,
    })
}

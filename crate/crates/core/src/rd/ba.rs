use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{DiscreteDistribution, RdError};

const MAX_ITERATIONS: usize = 10_000;
/// Upper-minus-lower bound gap (bits) at which an iteration counts as converged.
const GAP: f64 = 1e-10;
/// Accepted gap when the iteration budget runs out.
const LOOSE_GAP: f64 = 1e-6;
const BISECTION_STEPS: usize = 200;
/// Largest finite slope (nats) tried before switching to the masked solve.
const SLOPE_CEILING: f64 = 1e12;

/// Finite distortion matrix `d[a][b]`, source letter `a`, reconstruction `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DistortionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, RdError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(RdError::InvalidDistribution("distortion matrix must be rectangular and nonempty".into()));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|x| !x.is_finite()) {
            return Err(RdError::InvalidDistribution("distortion entries must be finite".into()));
        }
        Ok(DistortionMatrix {
            rows: data.len() / cols,
            cols,
            data,
        })
    }

    pub fn hamming(size: usize) -> Self {
        let rows = (0..size)
            .map(|a| (0..size).map(|b| if a == b { 0.0 } else { 1.0 }).collect())
            .collect();
        DistortionMatrix::new(rows).expect("square 0/1 matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.cols + b]
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.data[a * self.cols..(a + 1) * self.cols]
    }

    fn row_min(&self, a: usize) -> f64 {
        self.row(a).iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// A point on R(D): rate in bits and λ* = −R'(D) in bits per unit distortion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdCurvePoint {
    pub distortion: f64,
    pub rate: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdSolution {
    pub point: RdCurvePoint,
    /// Lagrange slope in nats per unit distortion (0 at the zero-rate corner).
    pub slope_nats: f64,
    /// Optimal reconstruction marginal P_Š*.
    pub output: Vec<f64>,
    /// Optimal test channel `channel[a][b]`.
    pub channel: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub(crate) struct SlopeSolution {
    pub distortion: f64,
    pub rate: f64,
    pub output: Vec<f64>,
    pub channel: Vec<Vec<f64>>,
}

/// (D_min, D_max, best single reconstruction letter).
pub(crate) fn distortion_range(p: &[f64], d: &DistortionMatrix) -> (f64, f64, usize) {
    let d_min = p
        .iter()
        .enumerate()
        .map(|(a, pa)| pa * d.row_min(a))
        .sum();
    let (best, d_max) = (0..d.cols())
        .map(|b| (b, p.iter().enumerate().map(|(a, pa)| pa * d.get(a, b)).sum::<f64>()))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    (d_min, d_max, best)
}

pub(crate) fn point_mass(p: &[f64], d: &DistortionMatrix, b: usize) -> SlopeSolution {
    let mut output = vec![0.0; d.cols()];
    output[b] = 1.0;
    SlopeSolution {
        distortion: p.iter().enumerate().map(|(a, pa)| pa * d.get(a, b)).sum(),
        rate: 0.0,
        channel: vec![output.clone(); p.len()],
        output,
    }
}

/// Blahut–Arimoto at a fixed slope `s` (nats). `s = ∞` restricts each row to
/// its minimum-distortion letters (the D_min end of the curve).
pub(crate) fn solve_at_slope(p: &[f64], d: &DistortionMatrix, s: f64) -> Result<SlopeSolution, RdError> {
    let (a_n, b_n) = (d.rows(), d.cols());
    // Row-shifted weights exp(−s(d − min_b d)) stay in (0, 1].
    let weights: Vec<Vec<f64>> = (0..a_n)
        .map(|a| {
            let m = d.row_min(a);
            d.row(a)
                .iter()
                .map(|&x| {
                    let e = x - m;
                    if s.is_infinite() {
                        if e <= 0.0 {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        (-s * e).exp()
                    }
                })
                .collect()
        })
        .collect();
    let mut q = vec![1.0 / b_n as f64; b_n];
    let mut z = vec![0.0; a_n];
    for iter in 1..=MAX_ITERATIONS {
        for a in 0..a_n {
            z[a] = weights[a].iter().zip(&q).map(|(w, qb)| w * qb).sum();
        }
        // c_b = Σ_a p_a w_ab / Z_a; the fixed point has c_b ≤ 1 with equality on supp q.
        let c: Vec<f64> = (0..b_n)
            .map(|b| {
                (0..a_n)
                    .filter(|&a| p[a] > 0.0)
                    .map(|a| p[a] * weights[a][b] / z[a])
                    .sum()
            })
            .collect();
        let max_log_c = c.iter().map(|x| x.log2()).fold(f64::NEG_INFINITY, f64::max);
        let mean_log_c: f64 = q
            .iter()
            .zip(&c)
            .filter(|(qb, _)| **qb > 0.0)
            .map(|(qb, cb)| qb * cb.log2())
            .sum();
        let gap = max_log_c - mean_log_c;
        q.iter_mut().zip(&c).for_each(|(qb, cb)| *qb *= cb);
        let total: f64 = q.iter().sum();
        q.iter_mut().for_each(|qb| *qb /= total);
        if gap < GAP || (iter == MAX_ITERATIONS && gap < LOOSE_GAP) {
            return Ok(finish(p, d, &weights, q));
        }
    }
    Err(RdError::NotConverged {
        iterations: MAX_ITERATIONS,
    })
}

fn finish(p: &[f64], d: &DistortionMatrix, weights: &[Vec<f64>], q: Vec<f64>) -> SlopeSolution {
    let mut distortion = 0.0;
    let mut rate = 0.0;
    let channel: Vec<Vec<f64>> = (0..d.rows())
        .map(|a| {
            let za: f64 = weights[a].iter().zip(&q).map(|(w, qb)| w * qb).sum();
            let row: Vec<f64> = weights[a].iter().zip(&q).map(|(w, qb)| w * qb / za).collect();
            for (b, &qab) in row.iter().enumerate() {
                if qab > 0.0 && p[a] > 0.0 {
                    distortion += p[a] * qab * d.get(a, b);
                    rate += p[a] * qab * (qab / q[b]).log2();
                }
            }
            row
        })
        .collect();
    SlopeSolution {
        distortion,
        rate: rate.max(0.0),
        output: q,
        channel,
    }
}

/// Finds the slope whose distortion matches `target` by bisection;
/// `eval(s)` must be nonincreasing in s.
pub(crate) fn bisect_slope<T, F>(target: f64, mut eval: F) -> Result<(f64, T), RdError>
where
    F: FnMut(f64) -> Result<(f64, T), RdError>,
{
    let mut hi = 1.0;
    let mut hi_val = eval(hi)?;
    while hi_val.0 > target {
        if hi > SLOPE_CEILING {
            let masked = eval(f64::INFINITY)?;
            return Ok((f64::INFINITY, masked.1));
        }
        hi *= 2.0;
        hi_val = eval(hi)?;
    }
    let mut lo = 0.0;
    let mut best = (hi, hi_val);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = eval(mid)?;
        let dist = v.0;
        if dist > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (dist - target).abs() <= (best.1 .0 - target).abs() {
            best = (mid, v);
        }
        if (dist - target).abs() <= 1e-14 * target.max(1.0) {
            break;
        }
    }
    Ok((best.0, best.1 .1))
}

/// R_S(D) by Blahut–Arimoto with the slope tuned to hit `d_target`.
pub fn blahut_arimoto_rd(
    source: &DiscreteDistribution,
    d: &DistortionMatrix,
    d_target: f64,
) -> Result<RdSolution, RdError> {
    let p = source.probs();
    if d.rows() != p.len() {
        return Err(RdError::InvalidDistribution(format!(
            "distortion matrix has {} rows for an alphabet of {}",
            d.rows(),
            p.len()
        )));
    }
    if !(d_target >= 0.0) {
        return Err(RdError::OutOfRange {
            name: "D",
            value: d_target,
            reason: "must be >= 0",
        });
    }
    let (d_min, d_max, best) = distribution_range_checked(p, d, d_target)?;
    if d_target >= d_max {
        let sol = point_mass(p, d, best);
        return Ok(package(d_target, 0.0, sol));
    }
    let (s, sol) = if d_target <= d_min + 1e-13 {
        (f64::INFINITY, solve_at_slope(p, d, f64::INFINITY)?)
    } else {
        bisect_slope(d_target, |s| {
            let sol = solve_at_slope(p, d, s)?;
            Ok((sol.distortion, sol))
        })?
    };
    Ok(package(d_target, s, sol))
}

fn distribution_range_checked(p: &[f64], d: &DistortionMatrix, target: f64) -> Result<(f64, f64, usize), RdError> {
    let (d_min, d_max, best) = distortion_range(p, d);
    if target < d_min - 1e-12 {
        return Err(RdError::BelowMinimum {
            requested: target,
            d_min,
        });
    }
    Ok((d_min, d_max, best))
}

fn package(d_target: f64, s: f64, sol: SlopeSolution) -> RdSolution {
    RdSolution {
        point: RdCurvePoint {
            distortion: d_target,
            rate: sol.rate,
            slope: s * std::f64::consts::LOG2_E,
        },
        slope_nats: s,
        output: sol.output,
        channel: sol.channel,
    }
}

/// R_S(D) on a grid of distortions.
pub fn rd_curve(
    source: &DiscreteDistribution,
    d: &DistortionMatrix,
    grid: &[f64],
) -> Result<Vec<RdCurvePoint>, RdError> {
    grid.iter()
        .map(|&x| blahut_arimoto_rd(source, d, x).map(|s| s.point))
        .collect()
}

/// CSV with columns `D,rate_bits,slope`.
pub fn write_rd_csv(points: &[RdCurvePoint], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "D,rate_bits,slope")?;
    for p in points {
        writeln!(out, "{},{},{}", p.distortion, p.rate, p.slope)?;
    }
    Ok(())
}

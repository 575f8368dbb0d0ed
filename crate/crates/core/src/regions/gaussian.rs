use serde::{Deserialize, Serialize};

use super::{plus, BoundVerdict, Constraint, OptimalityVerdict, RegionError, RegionPoint, Sense};
use crate::models::linear_mmse;
use crate::rd::half_log_plus;
use crate::tol;

fn check_nonneg(name: &'static str, x: f64) -> Result<(), RegionError> {
    if x.is_nan() || x < 0.0 {
        return Err(RegionError::OutOfRange {
            name,
            value: x,
            reason: "must be >= 0",
        });
    }
    Ok(())
}

fn check_positive(name: &'static str, x: f64) -> Result<(), RegionError> {
    if !(x > 0.0) {
        return Err(RegionError::OutOfRange {
            name,
            value: x,
            reason: "must be > 0",
        });
    }
    Ok(())
}

fn check_noise(noise: &[f64; 3]) -> Result<(), RegionError> {
    noise.iter().try_for_each(|&n| check_nonneg("noise", n))
}

/// λN₀/(P'+N₀) divided by D₀, with 0/0 = 0 (an exact observation needs no
/// extra rate).
fn keyed_ratio(variance: f64, power: f64, n0: f64, d0: f64) -> f64 {
    let floor = linear_mmse(variance, power, n0);
    if floor == 0.0 {
        0.0
    } else {
        floor / d0
    }
}

/// min{R_K + ½log⁺(λN₀/(D₀(P'+N₀))), ½log⁺(λ/D₀)}.
pub fn gaussian_inner_cap(key_rate: f64, d0: f64, variance: f64, power: f64, n0: f64) -> f64 {
    let keyed = key_rate + half_log_plus(keyed_ratio(variance, power, n0, d0));
    keyed.min(half_log_plus(variance / d0))
}

/// Achievable region of the linear schemes at transmit power P'.
pub fn gaussian_inner(
    point: &RegionPoint,
    power: f64,
    variance: f64,
    noise: &[f64; 3],
) -> Result<BoundVerdict, RegionError> {
    point.validate()?;
    check_nonneg("P'", power)?;
    check_positive("variance", variance)?;
    check_noise(noise)?;
    let keyed = point.key_rate + half_log_plus(keyed_ratio(variance, power, noise[0], point.d0));
    let keyless = half_log_plus(variance / point.d0);
    let constraints = vec![
        Constraint::new("D1 >= lN1/(P'+N1)", point.d1, Sense::AtLeast, linear_mmse(variance, power, noise[1])),
        Constraint::new("D2 >= lN2/(P'+N2)", point.d2, Sense::AtLeast, linear_mmse(variance, power, noise[2])),
        Constraint::new("R_L <= keyed", point.list_rate, Sense::AtMost, keyed),
        Constraint::new("R_L <= keyless", point.list_rate, Sense::AtMost, keyless),
    ];
    Ok(BoundVerdict::from_constraints(keyed.min(keyless), constraints))
}

/// ½log⁺((1+P/N_i)/(1+P/N₀)), taking limits at zero noise.
fn snr_gap(power: f64, ni: f64, n0: f64) -> f64 {
    if n0 == 0.0 {
        return 0.0;
    }
    if ni == 0.0 {
        return f64::INFINITY;
    }
    half_log_plus((1.0 + power / ni) / (1.0 + power / n0))
}

fn outer_user_rate(point: &RegionPoint, power: f64, noise: &[f64; 3], i: usize) -> f64 {
    let di = point.user_distortion(i);
    let ratio = if di == 0.0 { 0.0 } else { di / point.d0 };
    point.key_rate + snr_gap(power, noise[i], noise[0]) + half_log_plus(ratio)
}

pub fn gaussian_outer_cap(point: &RegionPoint, variance: f64, power: f64, noise: &[f64; 3]) -> f64 {
    outer_user_rate(point, power, noise, 1)
        .min(outer_user_rate(point, power, noise, 2))
        .min(half_log_plus(variance / point.d0))
}

/// Outer bound valid for every scheme with power limit P.
pub fn gaussian_outer(
    point: &RegionPoint,
    variance: f64,
    power: f64,
    noise: &[f64; 3],
) -> Result<BoundVerdict, RegionError> {
    point.validate()?;
    check_positive("P", power)?;
    check_positive("variance", variance)?;
    check_noise(noise)?;
    let r1 = outer_user_rate(point, power, noise, 1);
    let r2 = outer_user_rate(point, power, noise, 2);
    let keyless = half_log_plus(variance / point.d0);
    let constraints = vec![
        Constraint::new("D1 >= lN1/(P+N1)", point.d1, Sense::AtLeast, linear_mmse(variance, power, noise[1])),
        Constraint::new("D2 >= lN2/(P+N2)", point.d2, Sense::AtLeast, linear_mmse(variance, power, noise[2])),
        Constraint::new("R_L <= R1", point.list_rate, Sense::AtMost, r1),
        Constraint::new("R_L <= R2", point.list_rate, Sense::AtMost, r2),
        Constraint::new("R_L <= keyless", point.list_rate, Sense::AtMost, keyless),
    ];
    Ok(BoundVerdict::from_constraints(r1.min(r2).min(keyless), constraints))
}

const EQ: f64 = 1e-12;

/// Optimal when `N₀ ≤ N_i, D₀ ≥ D_i` or `N₀ ≥ N_i, D₀ ≤ D_i = λN_i/(P+N_i)`
/// for some user i. Caps are compared at full power P' = P.
pub fn gaussian_optimality(
    point: &RegionPoint,
    variance: f64,
    power: f64,
    noise: &[f64; 3],
) -> Result<OptimalityVerdict, RegionError> {
    let outer = gaussian_outer(point, variance, power, noise)?;
    let n0 = noise[0];
    let fired = [1usize, 2].into_iter().find_map(|i| {
        let (ni, di) = (noise[i], point.user_distortion(i));
        if n0 <= ni && point.d0 >= di {
            Some((i, 1u8))
        } else if n0 >= ni && point.d0 <= di && (di - linear_mmse(variance, power, ni)).abs() <= EQ {
            Some((i, 2u8))
        } else {
            None
        }
    });
    let caps = match fired {
        Some(_) => {
            let inner = gaussian_inner(point, power, variance, noise)?;
            let feasible = inner
                .constraints
                .iter()
                .filter(|c| c.label.starts_with('D'))
                .all(|c| c.satisfied);
            feasible.then_some((inner.list_rate_cap, outer.list_rate_cap))
        }
        None => None,
    };
    Ok(OptimalityVerdict {
        optimal: fired.is_some(),
        fired,
        caps,
    })
}

/// R^UB_{S|Z}(D₀) of the sign-change scheme: `(λ−D₀)(P'+N₀)/(λP')` above
/// the linear-estimation floor λN₀/(P'+N₀), `1 + ½log(λN₀/(D₀(P'+N₀)))`
/// at or below it; zero for D₀ ≥ λ.
pub fn sign_change_upper_bound(d0: f64, variance: f64, power: f64, n0: f64) -> Result<f64, RegionError> {
    check_nonneg("D0", d0)?;
    check_positive("variance", variance)?;
    check_nonneg("N0", n0)?;
    if !(power > 0.0) {
        return Err(RegionError::Degenerate(
            "sign-change scheme with P' = 0 transmits nothing".into(),
        ));
    }
    let floor = linear_mmse(variance, power, n0);
    Ok(if d0 >= variance {
        0.0
    } else if d0 > floor {
        (variance - d0) * (power + n0) / (variance * power)
    } else if d0 == 0.0 {
        if floor == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        1.0 + 0.5 * (floor / d0).log2()
    })
}

/// R_L cap of the sign-change scheme: min{R^UB, ½log⁺(λ/D₀)}.
pub fn sign_change_upper(d0: f64, variance: f64, power: f64, n0: f64) -> Result<f64, RegionError> {
    Ok(sign_change_upper_bound(d0, variance, power, n0)?.min(half_log_plus(variance / d0)))
}

/// Solves Σ_j min{ℓ, levels_j} = target for the water level ℓ. Returns the
/// largest level when the target exceeds Σ levels_j.
pub fn solve_water_level(levels: &[f64], target: f64) -> Result<f64, RegionError> {
    if !(target > 0.0) {
        return Err(RegionError::OutOfRange {
            name: "D0",
            value: target,
            reason: "water-filling needs D0 > 0",
        });
    }
    let top = levels.iter().copied().fold(0.0, f64::max);
    let filled = |l: f64| levels.iter().map(|&x| x.min(l)).sum::<f64>();
    if target >= filled(top) {
        return Ok(top);
    }
    let (mut lo, mut hi) = (0.0, top);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if filled(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * top {
            break;
        }
    }
    let level = 0.5 * (lo + hi);
    // Closed form on the active set {j : levels_j > ℓ}.
    let active = levels.iter().filter(|&&x| x > level).count();
    if active > 0 {
        let frozen: f64 = levels.iter().filter(|&&x| x <= level).sum();
        let exact = (target - frozen) / active as f64;
        let consistent = levels
            .iter()
            .all(|&x| if x > level { x >= exact } else { x <= exact + tol::WATER_LEVEL });
        if consistent && (filled(exact) - target).abs() <= (filled(level) - target).abs() {
            return Ok(exact);
        }
    }
    Ok(level)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorInner {
    pub verdict: BoundVerdict,
    /// Water level μ of Σ min{μ, λ_j} = D₀.
    pub mu: f64,
    /// Water level θ of Σ min{θ, λ_jN_{0,j}/(P_j+N_{0,j})} = D₀.
    pub theta: f64,
    /// R_S(D₀) = Σ ½log⁺(λ_j/μ).
    pub rate: f64,
    /// R_{S|Z}(D₀) = Σ ½log⁺(λ_jN_{0,j}/(θ(P_j+N_{0,j}))).
    pub conditional_rate: f64,
}

/// Achievable region of the per-subchannel scheme with powers P_j.
pub fn vector_gaussian_inner(
    point: &RegionPoint,
    powers: &[f64],
    variances: &[f64],
    noise: &[Vec<f64>; 3],
) -> Result<VectorInner, RegionError> {
    point.validate()?;
    let m = variances.len();
    if m == 0 || powers.len() != m || noise.iter().any(|r| r.len() != m) {
        return Err(RegionError::Degenerate("subchannel counts differ".into()));
    }
    for &v in variances {
        check_positive("variance", v)?;
    }
    for &p in powers {
        check_nonneg("P_j", p)?;
    }
    for row in noise {
        for &n in row {
            check_nonneg("noise", n)?;
        }
    }
    let floor = |i: usize| -> Vec<f64> {
        (0..m)
            .map(|j| linear_mmse(variances[j], powers[j], noise[i][j]))
            .collect()
    };
    let gamma = floor(0);
    let mu = solve_water_level(variances, point.d0)?;
    let rate: f64 = variances.iter().map(|&l| half_log_plus(l / mu)).sum();
    let gamma_total: f64 = gamma.iter().sum();
    let (theta, conditional_rate) = if point.d0 >= gamma_total {
        (gamma.iter().copied().fold(0.0, f64::max), 0.0)
    } else {
        let theta = solve_water_level(&gamma, point.d0)?;
        (theta, gamma.iter().map(|&g| half_log_plus(g / theta)).sum())
    };
    let keyed = point.key_rate + conditional_rate;
    let d1: f64 = floor(1).iter().sum();
    let d2: f64 = floor(2).iter().sum();
    let constraints = vec![
        Constraint::new("D1 >= sum lN1/(P+N1)", point.d1, Sense::AtLeast, d1),
        Constraint::new("D2 >= sum lN2/(P+N2)", point.d2, Sense::AtLeast, d2),
        Constraint::new("R_L <= keyed", point.list_rate, Sense::AtMost, keyed),
        Constraint::new("R_L <= keyless", point.list_rate, Sense::AtMost, rate),
    ];
    Ok(VectorInner {
        verdict: BoundVerdict::from_constraints(plus(keyed.min(rate)), constraints),
        mu,
        theta,
        rate,
        conditional_rate,
    })
}

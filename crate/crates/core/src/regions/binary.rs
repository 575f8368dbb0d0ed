use super::{plus, BoundVerdict, Constraint, OptimalityVerdict, RegionError, RegionPoint, Sense};
use crate::rd::{h2, star};

/// H₂ restricted to [0, 1/2]: distortions beyond 1/2 cost nothing more.
fn hc(x: f64) -> f64 {
    h2(x.min(0.5))
}

fn check_crossover(p_prime: f64, crossover: &[f64; 3]) -> Result<(), RegionError> {
    if !(0.0..=0.5).contains(&p_prime) {
        return Err(RegionError::OutOfRange {
            name: "p'",
            value: p_prime,
            reason: "must lie in [0, 1/2]",
        });
    }
    if let Some(&p) = crossover.iter().find(|p| !(0.0..=0.5).contains(*p)) {
        return Err(RegionError::OutOfRange {
            name: "crossover",
            value: p,
            reason: "must lie in [0, 1/2]",
        });
    }
    Ok(())
}

/// (keyed, keyless) terms of min{R_K + [H₂(p'⋆p₀) − H₂(D₀)]⁺, [1 − H₂(D₀)]⁺}.
fn inner_terms(key_rate: f64, d0: f64, p_prime: f64, p0: f64) -> (f64, f64) {
    let keyed = key_rate + plus(h2(star(p_prime, p0)) - hc(d0));
    let keyless = plus(1.0 - hc(d0));
    (keyed, keyless)
}

pub fn binary_inner_cap(key_rate: f64, d0: f64, p_prime: f64, crossover: &[f64; 3]) -> f64 {
    let (a, b) = inner_terms(key_rate, d0, p_prime, crossover[0]);
    a.min(b)
}

/// Achievable region of the permutation scheme with test channel BSC(p').
pub fn binary_inner(
    point: &RegionPoint,
    p_prime: f64,
    crossover: &[f64; 3],
) -> Result<BoundVerdict, RegionError> {
    point.validate()?;
    check_crossover(p_prime, crossover)?;
    let (keyed, keyless) = inner_terms(point.key_rate, point.d0, p_prime, crossover[0]);
    let constraints = vec![
        Constraint::new("D1 >= p'*p1", point.d1, Sense::AtLeast, star(p_prime, crossover[1])),
        Constraint::new("D2 >= p'*p2", point.d2, Sense::AtLeast, star(p_prime, crossover[2])),
        Constraint::new("R_L <= keyed", point.list_rate, Sense::AtMost, keyed),
        Constraint::new("R_L <= keyless", point.list_rate, Sense::AtMost, keyless),
    ];
    Ok(BoundVerdict::from_constraints(keyed.min(keyless), constraints))
}

fn outer_user_rate(point: &RegionPoint, crossover: &[f64; 3], i: usize) -> f64 {
    point.key_rate
        + plus(h2(crossover[0]) - h2(crossover[i]))
        + plus(hc(point.user_distortion(i)) - hc(point.d0))
}

pub fn binary_outer_cap(point: &RegionPoint, crossover: &[f64; 3]) -> f64 {
    outer_user_rate(point, crossover, 1)
        .min(outer_user_rate(point, crossover, 2))
        .min(plus(1.0 - hc(point.d0)))
}

/// Outer bound valid for every scheme.
pub fn binary_outer(point: &RegionPoint, crossover: &[f64; 3]) -> Result<BoundVerdict, RegionError> {
    point.validate()?;
    check_crossover(0.0, crossover)?;
    let r1 = outer_user_rate(point, crossover, 1);
    let r2 = outer_user_rate(point, crossover, 2);
    let keyless = plus(1.0 - hc(point.d0));
    let constraints = vec![
        Constraint::new("D1 >= p1", point.d1, Sense::AtLeast, crossover[1]),
        Constraint::new("D2 >= p2", point.d2, Sense::AtLeast, crossover[2]),
        Constraint::new("R_L <= R1", point.list_rate, Sense::AtMost, r1),
        Constraint::new("R_L <= R2", point.list_rate, Sense::AtMost, r2),
        Constraint::new("R_L <= keyless", point.list_rate, Sense::AtMost, keyless),
    ];
    Ok(BoundVerdict::from_constraints(r1.min(r2).min(keyless), constraints))
}

const EQ: f64 = 1e-12;

/// The scheme is optimal when `p₀ ≤ p_i ≤ D_i ≤ D₀` or `p₀ ≥ p_i = D_i ≥ D₀`
/// for some user i. When a condition fires, the inner bound is evaluated at
/// the p' with p'⋆p_i = D_i and, if the point meets every inner distortion
/// constraint there, the two R_L caps are reported for comparison.
pub fn binary_optimality(point: &RegionPoint, crossover: &[f64; 3]) -> Result<OptimalityVerdict, RegionError> {
    point.validate()?;
    check_crossover(0.0, crossover)?;
    let p0 = crossover[0];
    let fired = [1usize, 2].into_iter().find_map(|i| {
        let (pi, di) = (crossover[i], point.user_distortion(i));
        if p0 <= pi && pi <= di && di <= point.d0 {
            Some((i, 1u8))
        } else if p0 >= pi && (pi - di).abs() <= EQ && di >= point.d0 {
            Some((i, 2u8))
        } else {
            None
        }
    });
    let caps = match fired {
        Some((i, _)) => {
            let (pi, di) = (crossover[i], point.user_distortion(i));
            let p_prime = if pi >= 0.5 {
                0.0
            } else {
                ((di - pi) / (1.0 - 2.0 * pi)).clamp(0.0, 0.5)
            };
            let inner = binary_inner(point, p_prime, crossover)?;
            let feasible = inner
                .constraints
                .iter()
                .filter(|c| c.label.starts_with('D'))
                .all(|c| c.satisfied);
            feasible.then(|| (inner.list_rate_cap, binary_outer_cap(point, crossover)))
        }
        None => None,
    };
    Ok(OptimalityVerdict {
        optimal: fired.is_some(),
        fired,
        caps,
    })
}

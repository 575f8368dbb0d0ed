//! Membership predicates for the typical sets used in the analysis.

use super::entropy;

fn empirical(s: &[u8], size: usize) -> Vec<f64> {
    let mut t = vec![0.0; size];
    for &x in s {
        t[x as usize] += 1.0;
    }
    let n = s.len() as f64;
    t.iter_mut().for_each(|c| *c /= n);
    t
}

/// Σ_s |T_{sⁿ}(s) − P(s)| ≤ δ.
pub fn strong_typical(s: &[u8], p: &[f64], delta: f64) -> bool {
    if s.is_empty() {
        return false;
    }
    let size = s.iter().map(|&x| x as usize + 1).max().unwrap_or(0).max(p.len());
    let t = empirical(s, size);
    let l1: f64 = (0..size)
        .map(|a| (t[a] - p.get(a).copied().unwrap_or(0.0)).abs())
        .sum();
    l1 <= delta
}

/// |−(1/n) log₂ P(sⁿ) − H(S)| ≤ δ.
pub fn weak_typical(s: &[u8], p: &[f64], delta: f64) -> bool {
    if s.is_empty() {
        return false;
    }
    let mut log_p = 0.0;
    for &x in s {
        match p.get(x as usize) {
            Some(&px) if px > 0.0 => log_p += px.log2(),
            _ => return false,
        }
    }
    (-log_p / s.len() as f64 - entropy(p)).abs() <= delta
}

/// Strongly typical at δ/log₂ n and weakly typical at δ; needs n ≥ 2.
pub fn unified_typical(s: &[u8], p: &[f64], delta: f64) -> bool {
    let n = s.len();
    if n < 2 {
        return false;
    }
    strong_typical(s, p, delta / (n as f64).log2()) && weak_typical(s, p, delta)
}

fn norm_ratio(v: &[f64], variance: f64) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>() / (v.len() as f64 * variance)
}

/// |‖xⁿ‖²/(nN_X) − 1| ≤ δ.
pub fn gaussian_weak_typical(x: &[f64], n_x: f64, delta: f64) -> bool {
    !x.is_empty() && (norm_ratio(x, n_x) - 1.0).abs() <= delta
}

/// Joint weak typicality of (xⁿ, zⁿ) for Z = X + U with variances N_X,
/// N_Z, N_U.
pub fn gaussian_joint_typical(x: &[f64], z: &[f64], n_x: f64, n_z: f64, n_u: f64, delta: f64) -> bool {
    if x.is_empty() || x.len() != z.len() {
        return false;
    }
    let rx = norm_ratio(x, n_x);
    let rz = norm_ratio(z, n_z);
    let u: Vec<f64> = z.iter().zip(x).map(|(a, b)| a - b).collect();
    let ru = norm_ratio(&u, n_u);
    (rx - 1.0).abs() <= delta && (rz - 1.0).abs() <= delta && (rx + ru - 2.0).abs() <= delta
}

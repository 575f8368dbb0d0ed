//! Tail functionals of countable distributions and the admissibility
//! conditions for running the permutation scheme over countable alphabets:
//!
//! * N(α) = |{s : P(s) ≥ α}|
//! * Φ(α) = Σ_{P(s) < α} P(s)
//! * Ñ(β) = min { N(α) : Φ(α) ≤ β }
//!
//! The conditions N(1/n) = o(n/log n), Φ(1/n) = o(1/log n) and
//! Ñ(δ/log n) = o(n/log² n) are asymptotic, so [`admissible`] can only give a
//! finite-n heuristic verdict.

use serde::{Deserialize, Serialize};

use super::RdError;

/// A distribution on {1, 2, …} listed in nonincreasing probability order.
pub trait CountableDistribution: Sync {
    /// Probability of the letter with rank `rank` (1-based).
    fn prob(&self, rank: u64) -> f64;

    /// Certified `(lower, upper)` bounds on Σ_{r > count} P(r), or `None`
    /// when no certificate is available.
    fn tail_mass(&self, count: u64) -> Option<(f64, f64)>;

    /// Alphabet size, if finite.
    fn support(&self) -> Option<u64> {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    probs: Vec<f64>,
    suffix: Vec<f64>,
}

impl FiniteDistribution {
    pub fn new(mut probs: Vec<f64>) -> Result<Self, RdError> {
        super::DiscreteDistribution::new(probs.clone())?;
        probs.sort_by(|a, b| b.total_cmp(a));
        let mut suffix = vec![0.0; probs.len() + 1];
        for i in (0..probs.len()).rev() {
            suffix[i] = suffix[i + 1] + probs[i];
        }
        Ok(FiniteDistribution { probs, suffix })
    }
}

impl CountableDistribution for FiniteDistribution {
    fn prob(&self, rank: u64) -> f64 {
        self.probs.get(rank as usize - 1).copied().unwrap_or(0.0)
    }

    fn tail_mass(&self, count: u64) -> Option<(f64, f64)> {
        let t = self.suffix.get(count as usize).copied().unwrap_or(0.0);
        Some((t, t))
    }

    fn support(&self) -> Option<u64> {
        Some(self.probs.len() as u64)
    }
}

/// P(k) = (1 − r) r^{k−1}; r = 1/2 gives P(k) = 2^{−k}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometric {
    ratio: f64,
}

impl Geometric {
    pub fn new(ratio: f64) -> Result<Self, RdError> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(RdError::OutOfRange {
                name: "ratio",
                value: ratio,
                reason: "geometric ratio must lie in (0, 1)",
            });
        }
        Ok(Geometric { ratio })
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }
}

impl CountableDistribution for Geometric {
    fn prob(&self, rank: u64) -> f64 {
        (1.0 - self.ratio) * self.ratio.powf(rank as f64 - 1.0)
    }

    fn tail_mass(&self, count: u64) -> Option<(f64, f64)> {
        let t = self.ratio.powf(count as f64);
        Some((t, t))
    }
}

/// P(k) = k^{−s}/ζ(s), s > 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zeta {
    exponent: f64,
    norm: f64,
}

impl Zeta {
    pub fn new(exponent: f64) -> Result<Self, RdError> {
        if !(exponent > 1.0) {
            return Err(RdError::OutOfRange {
                name: "exponent",
                value: exponent,
                reason: "zeta distribution needs s > 1",
            });
        }
        Ok(Zeta {
            exponent,
            norm: riemann_zeta(exponent),
        })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }
}

/// ζ(s) by direct summation plus the Euler–Maclaurin tail.
fn riemann_zeta(s: f64) -> f64 {
    const M: u64 = 10_000;
    let head: f64 = (1..M).map(|k| (k as f64).powf(-s)).sum();
    let m = M as f64;
    head + m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s) + s * m.powf(-s - 1.0) / 12.0
}

impl CountableDistribution for Zeta {
    fn prob(&self, rank: u64) -> f64 {
        (rank as f64).powf(-self.exponent) / self.norm
    }

    fn tail_mass(&self, count: u64) -> Option<(f64, f64)> {
        if count == 0 {
            return Some((1.0, 1.0));
        }
        // ∫_{N+1}^∞ x^{−s} dx ≤ Σ_{k>N} k^{−s} ≤ ∫_N^∞ x^{−s} dx
        let s = self.exponent;
        let c = (s - 1.0) * self.norm;
        let n = count as f64;
        Some(((n + 1.0).powf(1.0 - s) / c, n.powf(1.0 - s) / c))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFunctionals {
    /// N(α)
    pub count: u64,
    /// Certified bounds on Φ(α).
    pub tail: (f64, f64),
    /// Ñ(β)
    pub count_for_tail: u64,
}

/// N(α) by doubling then bisection on the rank.
fn count_at_least(p: &dyn CountableDistribution, alpha: f64) -> u64 {
    if p.prob(1) < alpha {
        return 0;
    }
    let cap = p.support().unwrap_or(u64::MAX / 2);
    let mut hi = 1u64;
    while hi < cap && p.prob((2 * hi).min(cap)) >= alpha {
        hi = (2 * hi).min(cap);
    }
    if hi == cap {
        return cap;
    }
    // prob(lo) >= α > prob(hi')
    let (mut lo, mut up) = (hi, (2 * hi).min(cap));
    while up - lo > 1 {
        let mid = lo + (up - lo) / 2;
        if p.prob(mid) >= alpha {
            lo = mid;
        } else {
            up = mid;
        }
    }
    lo
}

/// Smallest N of the form N(α) whose certified tail is at most β.
fn count_for_tail(p: &dyn CountableDistribution, beta: f64) -> Result<u64, RdError> {
    let tail = |n: u64| p.tail_mass(n).map(|t| t.1).ok_or(RdError::NoTailCertificate);
    if tail(0)? <= beta {
        return Ok(0);
    }
    let cap = p.support().unwrap_or(u64::MAX / 2);
    let mut hi = 1u64;
    while hi < cap && tail(hi)? > beta {
        hi = (2 * hi).min(cap);
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if tail(mid)? > beta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // A threshold α cannot split letters of equal probability.
    while hi < cap && p.prob(hi + 1) == p.prob(hi) {
        hi += 1;
    }
    Ok(hi)
}

pub fn tail_functionals(
    p: &dyn CountableDistribution,
    alpha: f64,
    beta: f64,
) -> Result<TailFunctionals, RdError> {
    let count = count_at_least(p, alpha);
    let tail = p.tail_mass(count).ok_or(RdError::NoTailCertificate)?;
    Ok(TailFunctionals {
        count,
        tail,
        count_for_tail: count_for_tail(p, beta)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionTrace {
    pub name: String,
    pub n: Vec<u64>,
    /// Functional divided by its o(·) target at each n.
    pub ratios: Vec<f64>,
    pub decaying: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    /// Always true: the verdict extrapolates finite-n ratios.
    pub heuristic: bool,
    pub admissible: bool,
    pub conditions: Vec<ConditionTrace>,
}

/// Evaluates the three countable-alphabet conditions at n = 2⁴ … 2²⁰. A
/// condition counts as satisfied when its ratio at the largest n is at most a
/// quarter of the largest ratio seen (or the ratio is identically zero).
pub fn admissible(p: &dyn CountableDistribution) -> Result<AdmissibilityReport, RdError> {
    let ns: Vec<u64> = (4..=20).map(|e| 1u64 << e).collect();
    let mut traces = Vec::new();
    let mut push = |name: &str, ratios: Vec<f64>| {
        let max = ratios.iter().copied().fold(0.0, f64::max);
        let last = *ratios.last().expect("nonempty grid");
        traces.push(ConditionTrace {
            name: name.into(),
            n: ns.clone(),
            decaying: max == 0.0 || last <= 0.25 * max,
            ratios,
        });
    };
    let logn = |n: u64| (n as f64).log2();
    push(
        "N(1/n) / (n / log n)",
        ns.iter()
            .map(|&n| count_at_least(p, 1.0 / n as f64) as f64 * logn(n) / n as f64)
            .collect(),
    );
    let phi = ns
        .iter()
        .map(|&n| {
            let c = count_at_least(p, 1.0 / n as f64);
            p.tail_mass(c)
                .map(|t| t.1 * logn(n))
                .ok_or(RdError::NoTailCertificate)
        })
        .collect::<Result<Vec<_>, _>>()?;
    push("Phi(1/n) / (1 / log n)", phi);
    for delta in [1.0, 0.1] {
        let r = ns
            .iter()
            .map(|&n| {
                count_for_tail(p, delta / logn(n)).map(|c| c as f64 * logn(n).powi(2) / n as f64)
            })
            .collect::<Result<Vec<_>, _>>()?;
        push(&format!("Ntilde({delta}/log n) / (n / log^2 n)"), r);
    }
    Ok(AdmissibilityReport {
        heuristic: true,
        admissible: traces.iter().all(|t| t.decaying),
        conditions: traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_example() {
        let g = Geometric::new(0.5).unwrap();
        assert!(Geometric::new(1.0).is_err());
        let t = tail_functionals(&g, 0.125, 0.125).unwrap();
        assert_eq!(t.count, 3);
        assert!((t.tail.0 - 0.125).abs() < 1e-15 && (t.tail.1 - 0.125).abs() < 1e-15);
        assert_eq!(t.count_for_tail, 3);
        assert!(admissible(&g).unwrap().admissible);
    }

    #[test]
    fn finite_alphabet() {
        let f = FiniteDistribution::new(vec![0.1, 0.6, 0.3]).unwrap();
        let t = tail_functionals(&f, 0.05, 0.0).unwrap();
        assert_eq!(t.count, 3);
        assert_eq!(t.tail, (0.0, 0.0));
        assert_eq!(t.count_for_tail, 3);
        let r = admissible(&f).unwrap();
        assert!(r.admissible && r.heuristic);
    }

    #[test]
    fn ties_are_not_split() {
        let f = FiniteDistribution::new(vec![0.25; 4]).unwrap();
        assert_eq!(count_for_tail(&f, 0.5).unwrap(), 4);
    }

    #[test]
    fn zeta_two() {
        let z = Zeta::new(2.0).unwrap();
        assert!((z.norm - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
        let (lo, hi) = z.tail_mass(10).unwrap();
        let exact = 1.0 - (1..=10).map(|k| z.prob(k)).sum::<f64>();
        assert!(lo <= exact && exact <= hi);
        assert!(admissible(&z).unwrap().admissible);
        assert!(Zeta::new(1.0).is_err());
    }

    struct NoCertificate;

    impl CountableDistribution for NoCertificate {
        fn prob(&self, rank: u64) -> f64 {
            0.5f64.powi(rank as i32)
        }
        fn tail_mass(&self, _: u64) -> Option<(f64, f64)> {
            None
        }
    }

    #[test]
    fn missing_certificate() {
        assert_eq!(
            tail_functionals(&NoCertificate, 0.1, 0.1),
            Err(RdError::NoTailCertificate)
        );
    }
}

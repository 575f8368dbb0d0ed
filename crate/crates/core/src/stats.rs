//! Small statistics toolbox for the Monte-Carlo checks: running moments,
//! Wilson intervals and the goodness-of-fit / two-sample tests used by the
//! verification suite.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal, StudentsT};

/// Running mean and variance (Welford). Merging two accumulators is exact up
/// to rounding, so per-trial summaries can be combined in any grouping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / total;
        self.mean += delta * other.count as f64 / total;
        self.count += other.count;
    }

    /// Unbiased sample variance; zero for fewer than two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return f64::INFINITY;
        }
        (self.variance() / self.count as f64).sqrt()
    }

    /// Normal-approximation interval at the given two-sided confidence.
    pub fn confidence_interval(&self, confidence: f64) -> (f64, f64) {
        let z = normal_quantile(0.5 + confidence / 2.0);
        let half = z * self.std_error();
        (self.mean - half, self.mean + half)
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        for x in iter {
            m.push(x);
        }
        m
    }
}

pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = normal_quantile(0.5 + confidence / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // Rounding must not push the point estimate outside its own interval.
    ((center - half).min(p).max(0.0), (center + half).max(p).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit of `counts` against uniform expected frequencies.
pub fn chi_square_uniform(counts: &[u64]) -> ChiSquareResult {
    let total: u64 = counts.iter().sum();
    let expected = vec![total as f64 / counts.len().max(1) as f64; counts.len()];
    chi_square(counts, &expected)
}

/// Pearson goodness-of-fit of `counts` against `expected`. A single cell
/// (zero degrees of freedom) passes trivially with p = 1.
pub fn chi_square(counts: &[u64], expected: &[f64]) -> ChiSquareResult {
    assert_eq!(counts.len(), expected.len());
    let statistic: f64 = counts
        .iter()
        .zip(expected)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&c, &e)| {
            let d = c as f64 - e;
            d * d / e
        })
        .sum();
    let dof = counts.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .expect("positive degrees of freedom")
            .sf(statistic)
    };
    ChiSquareResult {
        statistic,
        dof,
        p_value,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (Stephens' small-sample correction).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = a[i].min(b[j]);
        while i < na && a[i] <= x {
            i += 1;
        }
        while j < nb && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let ne = (na * nb) as f64 / (na + nb) as f64;
    let sq = ne.sqrt();
    let p_value = kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d);
    KsResult {
        statistic: d,
        p_value,
    }
}

/// Survival function of the Kolmogorov distribution.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchResult {
    pub statistic: f64,
    pub dof: f64,
    pub p_value: f64,
}

/// Welch's two-sample t-test on the means.
pub fn welch_t_test(a: &Moments, b: &Moments) -> WelchResult {
    let va = a.variance() / a.count as f64;
    let vb = b.variance() / b.count as f64;
    let se2 = va + vb;
    if se2 == 0.0 {
        let p_value = if a.mean == b.mean { 1.0 } else { 0.0 };
        return WelchResult {
            statistic: 0.0,
            dof: f64::INFINITY,
            p_value,
        };
    }
    let t = (a.mean - b.mean) / se2.sqrt();
    let dof = se2 * se2
        / (va * va / (a.count as f64 - 1.0) + vb * vb / (b.count as f64 - 1.0));
    let dist = StudentsT::new(0.0, 1.0, dof).expect("valid degrees of freedom");
    WelchResult {
        statistic: t,
        dof,
        p_value: 2.0 * dist.sf(t.abs()),
    }
}

/// Two-sample z-test for equal proportions.
pub fn two_proportion_test(s1: u64, n1: u64, s2: u64, n2: u64) -> f64 {
    let p = (s1 + s2) as f64 / (n1 + n2) as f64;
    let se = (p * (1.0 - p) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    if se == 0.0 {
        return 1.0;
    }
    let z = (s1 as f64 / n1 as f64 - s2 as f64 / n2 as f64) / se;
    2.0 * Normal::standard().sf(z.abs())
}

/// One named pass/fail check: `statistic` compared against `threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `statistic <= threshold`.
    pub fn at_most(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            statistic,
            threshold,
            passed: statistic <= threshold,
        }
    }

    /// Passes when `statistic >= threshold` (p-values against a floor).
    pub fn at_least(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            statistic,
            threshold,
            passed: statistic >= threshold,
        }
    }
}

/// log₂ of an arbitrarily large integer, accurate to about 1e-15 relative.
pub fn log2_biguint(x: &num_bigint::BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.iter_u64_digits().next().unwrap_or(0) as f64).log2();
    }
    let shift = bits - 64;
    ((x >> shift).iter_u64_digits().next().unwrap_or(0) as f64).log2() + shift as f64
}

/// `ln(Σ exp(x_i))` without overflow.
pub fn log_sum_exp(values: impl IntoIterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_match_two_pass() {
        let xs = [1.0, 4.0, 2.5, -3.0, 7.25];
        let m: Moments = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        assert!((m.mean - mean).abs() < 1e-12);
        assert!((m.variance() - var).abs() < 1e-12);

        let mut left: Moments = xs[..2].iter().copied().collect();
        let right: Moments = xs[2..].iter().copied().collect();
        left.merge(&right);
        assert!((left.mean - mean).abs() < 1e-12);
        assert!((left.variance() - var).abs() < 1e-12);
    }

    #[test]
    fn wilson_contains_estimate_and_stays_in_unit_interval() {
        for (s, n) in [(0, 10), (10, 10), (3, 7), (500, 1000)] {
            let (lo, hi) = wilson_interval(s, n, 0.95);
            let p = s as f64 / n as f64;
            assert!(lo <= p && p <= hi);
            assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        }
    }

    #[test]
    fn chi_square_of_exact_uniform_counts_is_zero() {
        let r = chi_square_uniform(&[10, 10, 10, 10]);
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        assert_eq!(chi_square_uniform(&[42]).p_value, 1.0);
    }

    #[test]
    fn kolmogorov_sf_reference_points() {
        // Standard table values of the Kolmogorov distribution.
        assert!((kolmogorov_sf(1.36) - 0.0494).abs() < 1e-3);
        assert!((kolmogorov_sf(1.63) - 0.0098).abs() < 1e-3);
    }

    #[test]
    fn ks_detects_shift() {
        let a: Vec<f64> = (0..500).map(|i| i as f64 / 500.0).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 0.3).collect();
        assert!(ks_two_sample(&a, &b).p_value < 1e-6);
        assert!(ks_two_sample(&a, &a).p_value > 0.99);
    }
}

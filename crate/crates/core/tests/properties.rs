use proptest::prelude::*;
use rand::RngCore;
use uncoded_secrecy::adversary::{exhaustive_henchman, greedy_value, BinaryInstance, CandidatePool};
use uncoded_secrecy::codebook::StorageMode;
use uncoded_secrecy::models::{
    BroadcastChannel, KeyedRng, SchemeParams, SourceKind, SourceModel, SymbolMapping, System,
};
use uncoded_secrecy::permute::{type_of, Permutation, PermutationScheme};
use uncoded_secrecy::regions::{
    binary_inner, binary_outer, gaussian_inner, gaussian_inner_cap, gaussian_outer, sign_change_upper,
    solve_water_level, RegionPoint,
};
use uncoded_secrecy::stats::wilson_interval;

fn point() -> impl Strategy<Value = RegionPoint> {
    (0.0..2.0f64, 0.0..2.0f64, 0.001..1.0f64, 0.0..1.0f64, 0.0..1.0f64)
        .prop_map(|(rk, rl, d0, d1, d2)| RegionPoint::new(rk, rl, d0, d1, d2).unwrap())
}

fn binary_point() -> impl Strategy<Value = RegionPoint> {
    (0.0..2.0f64, 0.0..1.0f64, 0.0..0.5f64, 0.0..0.5f64, 0.0..0.5f64)
        .prop_map(|(rk, rl, d0, d1, d2)| RegionPoint::new(rk, rl, d0, d1, d2).unwrap())
}

proptest! {
    #[test]
    fn binary_inner_lies_in_outer(
        p in binary_point(),
        p_prime in 0.0..0.5f64,
        crossover in [0.0..0.5f64, 0.0..0.5f64, 0.0..0.5f64],
    ) {
        let inner = binary_inner(&p, p_prime, &crossover).unwrap();
        let outer = binary_outer(&p, &crossover).unwrap();
        prop_assert!(!inner.member || outer.member);
        // Caps are comparable once the point meets the inner distortion constraints.
        if inner.constraints[..2].iter().all(|c| c.satisfied) {
            prop_assert!(inner.list_rate_cap <= outer.list_rate_cap + 1e-12);
        }
    }

    #[test]
    fn gaussian_inner_lies_in_outer(
        p in point(),
        power in 0.01..10.0f64,
        fraction in 0.0..=1.0f64,
        variance in 0.1..4.0f64,
        noise in [0.0..4.0f64, 0.01..4.0f64, 0.01..4.0f64],
    ) {
        let inner = gaussian_inner(&p, power * fraction, variance, &noise).unwrap();
        let outer = gaussian_outer(&p, variance, power, &noise).unwrap();
        prop_assert!(!inner.member || outer.member);
    }

    #[test]
    fn sign_change_never_beats_proposed(
        d0 in 0.001..1.0f64,
        power in 0.1..10.0f64,
        n0 in 0.0..4.0f64,
    ) {
        let sign = sign_change_upper(d0, 1.0, power, n0).unwrap();
        let proposed = gaussian_inner_cap(1.0, d0, 1.0, power, n0);
        prop_assert!(sign <= proposed + 1e-12, "{sign} > {proposed}");
    }

    #[test]
    fn permutations_preserve_type(
        s in prop::collection::vec(0u8..4, 1..80),
        seed in any::<u64>(),
    ) {
        let psi = Permutation::random(s.len(), &mut KeyedRng::new(seed, 0));
        let out = psi.apply(&s).unwrap();
        prop_assert_eq!(type_of(&out, 4), type_of(&s, 4));
        prop_assert_eq!(psi.apply_inverse(&out).unwrap(), s);
    }

    #[test]
    fn wilson_interval_brackets_estimate(trials in 1u64..100_000, frac in 0.0..=1.0f64) {
        let k = ((trials as f64) * frac).round() as u64;
        let (lo, hi) = wilson_interval(k, trials, 0.95);
        let p = k as f64 / trials as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12);
        prop_assert!(p <= hi + 1e-12 && hi <= 1.0);
    }

    #[test]
    fn water_level_meets_target(
        levels in prop::collection::vec(0.01..4.0f64, 1..12),
        frac in 0.01..0.99f64,
    ) {
        let target = frac * levels.iter().sum::<f64>();
        let level = solve_water_level(&levels, target).unwrap();
        let filled: f64 = levels.iter().map(|&x| x.min(level)).sum();
        prop_assert!((filled - target).abs() <= 1e-9 * target.max(1.0));
    }

    #[test]
    fn keyed_rng_is_reproducible(seed in any::<u64>(), stream in any::<u64>(), label in any::<u64>()) {
        let draw = |mut r: KeyedRng| (0..8).map(|_| r.next_u64()).collect::<Vec<_>>();
        let a = KeyedRng::new(seed, stream);
        prop_assert_eq!(draw(a.clone()), draw(KeyedRng::new(seed, stream)));
        prop_assert_eq!(draw(a.fork(label)), draw(KeyedRng::new(seed, stream).fork(label)));
        prop_assert_ne!(draw(a.clone()), draw(KeyedRng::new(seed, stream.wrapping_add(1))));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn henchman_success_is_monotone(
        p in 0.05..0.95f64,
        p_prime in 0.0..0.3f64,
        p0 in 0.0..0.4f64,
        key_rate in prop::sample::select(vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]),
        seed in any::<u64>(),
    ) {
        let n = 3;
        let system = System::new(
            SourceModel::with_default_distortion(SourceKind::Bernoulli { p }).unwrap(),
            BroadcastChannel::BinarySymmetric { crossover: [p0, 0.2, 0.3] },
            SchemeParams::new(n, key_rate, SymbolMapping::BinaryTestChannel { crossover: p_prime }).unwrap(),
        )
        .unwrap();
        let scheme = PermutationScheme::new(system, seed, StorageMode::Materialized).unwrap();
        let instance = BinaryInstance::new(&scheme).unwrap();
        let grid: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let table: Vec<Vec<f64>> = grid
            .iter()
            .map(|&d0| grid.iter().map(|&r| exhaustive_henchman(&instance, d0, r).unwrap().success).collect())
            .collect();
        for (i, row) in table.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
                if j > 0 {
                    prop_assert!(v >= row[j - 1]);
                }
                if i > 0 {
                    prop_assert!(v >= table[i - 1][j]);
                }
                let greedy = greedy_value(&instance, grid[i], grid[j], CandidatePool::All).unwrap().success;
                prop_assert!(greedy <= v + 1e-12);
            }
        }
    }
}

use uncoded_secrecy::codebook::{Key, StorageMode};
use uncoded_secrecy::models::{
    sample_source_block, transmit, BroadcastChannel, Distortion, KeyedRng, Receiver, SchemeParams, SourceKind,
    SourceModel, SymbolMapping, System,
};
use uncoded_secrecy::ortho::OrthogonalScheme;

const N: usize = 512;
const TRIALS: u64 = 200;

/// Mean per-symbol MSE at user 1 (N₁ = 1, λ = P' = 1), decoding with
/// `decode_key(k)` when the encoder used k.
fn mean_mse(decode_key: impl Fn(&Key) -> Key) -> f64 {
    let system = System::new(
        SourceModel::with_default_distortion(SourceKind::Gaussian { variance: 1.0 }).unwrap(),
        BroadcastChannel::Awgn { noise: [1.0, 1.0, 2.0], power: 1.0 },
        SchemeParams::new(N, 1.0 / N as f64, SymbolMapping::Linear { power: 1.0 }).unwrap(),
    )
    .unwrap();
    let scheme = OrthogonalScheme::new(system, 17, StorageMode::Auto).unwrap();
    assert_eq!(scheme.key_bits(), 1);
    let model = scheme.system().source.clone();
    let mut total = 0.0;
    for t in 0..TRIALS {
        let rng = KeyedRng::new(5, t);
        let s = sample_source_block(&model, N, &mut rng.fork(0));
        let key = scheme.random_key(&mut rng.fork(1));
        let x = scheme.encode(&s, &key).unwrap();
        let out = transmit(&scheme.system().channel, &x, &rng.fork(3)).unwrap();
        let est = scheme.decode(out.get(Receiver::User1), &decode_key(&key), Receiver::User1).unwrap();
        total += s.distortion(&est, Distortion::SquaredError).unwrap();
    }
    total / TRIALS as f64
}

#[test]
fn right_key_meets_linear_mmse() {
    // λN₁/(P'+N₁)
    let oracle = 1.0 * 1.0 / (1.0 + 1.0);
    let mse = mean_mse(Key::clone);
    assert!((mse - oracle).abs() < 0.02, "{mse}");
}

#[test]
fn wrong_key_loses_the_source() {
    // With an independent rotation the cross term vanishes:
    // E|ŝ - s|²/n = λ + β²(P'+N₁) = λ + λP'/(P'+N₁).
    let oracle = 1.0 + 1.0 * 1.0 / (1.0 + 1.0);
    let flip = |k: &Key| Key::from_index(1, 1 - k.index().unwrap()).unwrap();
    let mse = mean_mse(flip);
    assert!((mse - oracle).abs() < 0.05, "{mse}");
}

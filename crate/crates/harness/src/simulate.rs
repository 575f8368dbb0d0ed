//! Monte-Carlo runs of a keyed scheme over the broadcast channel.
//!
//! Trial `t` at blocklength `n` draws everything from
//! `KeyedRng::new(stream_seed(seed, scenario, n), t)`: fork 0 is the
//! source, 1 the key, 2 the encoder noise, 3 the channel. Trials run in
//! parallel and are reduced in trial order, so summaries do not depend on
//! the thread count.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use uncoded_secrecy::models::{empirical_power, label_hash, mix, sample_source_block, transmit, KeyedRng, Receiver};
use uncoded_secrecy::scheme::SchemeInstance;
use uncoded_secrecy::stats::{wilson_interval, Moments};

use crate::config::{parse_json, read_text, stream_seed, ExperimentSpec};
use crate::output::{ensure_dir, fmt_f64, write_csv, write_json};
use crate::{HarnessError, SCHEMA_VERSION};

const CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    /// d(Sⁿ, Ŝⁿᵢ) for users 1 and 2.
    pub distortion: [f64; 2],
    /// ρ(Xⁿ).
    pub power: f64,
}

/// A count with its Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub count: u64,
    pub trials: u64,
    pub frequency: f64,
    pub ci: [f64; 2],
}

impl Frequency {
    pub fn new(count: u64, trials: u64) -> Self {
        let (lo, hi) = wilson_interval(count, trials, CONFIDENCE);
        Frequency {
            count,
            trials,
            frequency: count as f64 / trials as f64,
            ci: [lo, hi],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NSummary {
    pub schema_version: u32,
    pub n: usize,
    pub trials: u64,
    pub key_bits: u64,
    pub mean_distortion: [f64; 2],
    /// 95% normal-approximation intervals for the two means.
    pub distortion_ci: [[f64; 2]; 2],
    pub distortion_moments: [Moments; 2],
    pub power: Moments,
    /// P̂[dᵢ > Dᵢ + ε]; present when the spec sets targets.
    pub excess: Option<[Frequency; 2]>,
    /// P̂[ρ(Xⁿ) > P + ε]; present for power-limited channels.
    pub power_violation: Option<Frequency>,
}

/// Excess-distortion frequency against n, per user. Reported, not asserted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub user: usize,
    pub n: Vec<usize>,
    pub frequency: Vec<f64>,
    pub nonincreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub schema_version: u32,
    pub scenario: String,
    pub seed: u64,
    pub summaries: Vec<NSummary>,
    pub excess_trend: Vec<TrendRow>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    schema_version: u32,
    fingerprint: u64,
    summary: NSummary,
}

/// Runs all trials at one blocklength, in trial order.
pub fn simulate_trials(spec: &ExperimentSpec, n: usize, seed: u64) -> Result<Vec<TrialRecord>, HarnessError> {
    let scheme = spec.build_scheme(n, seed)?;
    let stream = stream_seed(seed, &spec.scenario, n);
    (0..spec.trials)
        .into_par_iter()
        .map(|t| run_trial(&scheme, &KeyedRng::new(stream, t), t))
        .collect()
}

fn run_trial(scheme: &SchemeInstance, rng: &KeyedRng, trial: u64) -> Result<TrialRecord, HarnessError> {
    let system = scheme.system();
    let s = sample_source_block(&system.source, system.n(), &mut rng.fork(0));
    let key = scheme.random_key(&mut rng.fork(1));
    let x = scheme.encode(&s, &key, &mut rng.fork(2))?;
    let out = transmit(&system.channel, &x, &rng.fork(3))?;
    let mut distortion = [0.0; 2];
    for (j, r) in Receiver::LEGITIMATE.into_iter().enumerate() {
        let estimate = scheme.decode(out.get(r), &key, r)?;
        distortion[j] = s.distortion(&estimate, system.source.distortion)?;
    }
    Ok(TrialRecord {
        trial,
        distortion,
        power: empirical_power(&x),
    })
}

pub fn summarize(spec: &ExperimentSpec, n: usize, records: &[TrialRecord]) -> Result<NSummary, HarnessError> {
    let system = spec.system(n)?;
    let key_bits = system.params.key_bits()?;
    let mut moments = [Moments::default(); 2];
    let mut power = Moments::default();
    for r in records {
        moments[0].push(r.distortion[0]);
        moments[1].push(r.distortion[1]);
        power.push(r.power);
    }
    let trials = records.len() as u64;
    let excess = spec.targets.as_ref().map(|t| {
        [0, 1].map(|j| {
            let hits = records
                .iter()
                .filter(|r| r.distortion[j] > t.distortion[j] + t.epsilon)
                .count() as u64;
            Frequency::new(hits, trials)
        })
    });
    let power_eps = spec
        .targets
        .as_ref()
        .map_or(0.0, |t| t.power_epsilon.unwrap_or(t.epsilon));
    let power_violation = system.channel.power_limit().map(|limit| {
        let hits = records.iter().filter(|r| r.power > limit + power_eps).count() as u64;
        Frequency::new(hits, trials)
    });
    Ok(NSummary {
        schema_version: SCHEMA_VERSION,
        n,
        trials,
        key_bits,
        mean_distortion: [moments[0].mean, moments[1].mean],
        distortion_ci: moments.map(|m| {
            let (lo, hi) = m.confidence_interval(CONFIDENCE);
            [lo, hi]
        }),
        distortion_moments: moments,
        power,
        excess,
        power_violation,
    })
}

fn fingerprint(spec: &ExperimentSpec, n: usize, seed: u64) -> Result<u64, HarnessError> {
    let text = serde_json::to_string(spec)?;
    Ok(mix(mix(label_hash(&text), seed), n as u64))
}

fn checkpoint_path(dir: &Path, n: usize) -> PathBuf {
    dir.join("checkpoints").join(format!("n{n}.json"))
}

fn load_checkpoint(path: &Path, fingerprint: u64) -> Option<NSummary> {
    let cp: Checkpoint = parse_json(&read_text(path).ok()?).ok()?;
    (cp.schema_version == SCHEMA_VERSION && cp.fingerprint == fingerprint).then_some(cp.summary)
}

/// Runs every blocklength in the spec. With `out_dir`, writes
/// `trials_n{n}.csv` and `simulation.json`, and checkpoints each finished
/// n under `checkpoints/`, so a rerun of the same spec and seed skips
/// completed blocklengths.
pub fn run_simulation(spec: &ExperimentSpec, seed: u64, out_dir: Option<&Path>) -> Result<SimulationReport, HarnessError> {
    spec.validate()?;
    if let Some(dir) = out_dir {
        ensure_dir(&dir.join("checkpoints"))?;
    }
    let mut summaries = Vec::with_capacity(spec.n.len());
    for &n in &spec.n {
        let fp = fingerprint(spec, n, seed)?;
        if let Some(dir) = out_dir {
            if let Some(done) = load_checkpoint(&checkpoint_path(dir, n), fp) {
                if dir.join(format!("trials_n{n}.csv")).exists() {
                    summaries.push(done);
                    continue;
                }
            }
        }
        let records = simulate_trials(spec, n, seed)?;
        let summary = summarize(spec, n, &records)?;
        if let Some(dir) = out_dir {
            write_trials(&dir.join(format!("trials_n{n}.csv")), &records)?;
            write_json(
                &checkpoint_path(dir, n),
                &Checkpoint {
                    schema_version: SCHEMA_VERSION,
                    fingerprint: fp,
                    summary: summary.clone(),
                },
            )?;
        }
        summaries.push(summary);
    }
    let report = SimulationReport {
        schema_version: SCHEMA_VERSION,
        scenario: spec.scenario.clone(),
        seed,
        excess_trend: excess_trend(&summaries),
        summaries,
    };
    if let Some(dir) = out_dir {
        write_json(&dir.join("simulation.json"), &report)?;
    }
    Ok(report)
}

fn write_trials(path: &Path, records: &[TrialRecord]) -> Result<(), HarnessError> {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                SCHEMA_VERSION.to_string(),
                r.trial.to_string(),
                fmt_f64(r.distortion[0]),
                fmt_f64(r.distortion[1]),
                fmt_f64(r.power),
            ]
        })
        .collect();
    write_csv(path, &["schema_version", "trial", "d1", "d2", "power"], &rows)
}

fn excess_trend(summaries: &[NSummary]) -> Vec<TrendRow> {
    let mut with_targets: Vec<&NSummary> = summaries.iter().filter(|s| s.excess.is_some()).collect();
    if with_targets.is_empty() {
        return Vec::new();
    }
    with_targets.sort_by_key(|s| s.n);
    (0..2)
        .map(|j| {
            let frequency: Vec<f64> = with_targets
                .iter()
                .map(|s| s.excess.as_ref().map_or(0.0, |e| e[j].frequency))
                .collect();
            TrendRow {
                user: j + 1,
                n: with_targets.iter().map(|s| s.n).collect(),
                nonincreasing: frequency.windows(2).all(|w| w[1] <= w[0]),
                frequency,
            }
        })
        .collect()
}

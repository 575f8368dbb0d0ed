//! Experiment configuration (JSON). See `docs/config.md` for the schema.

use std::path::Path;

use serde::{Deserialize, Serialize};
use uncoded_secrecy::adversary::{CandidatePool, QuantizerMode};
use uncoded_secrecy::codebook::StorageMode;
use uncoded_secrecy::models::{
    label_hash, mix, BroadcastChannel, SchemeParams, SourceKind, SourceModel, SymbolMapping, System,
};
use uncoded_secrecy::scheme::{SchemeInstance, SchemeKind};

use crate::{HarnessError, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub schema_version: u32,
    pub scenario: String,
    pub source: SourceKind,
    pub channel: BroadcastChannel,
    pub scheme: SchemeSpec,
    /// Blocklengths, run in order.
    pub n: Vec<usize>,
    #[serde(alias = "R_K")]
    pub key_rate: f64,
    pub trials: u64,
    /// Master seed; `--seed` overrides it.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub targets: Option<Targets>,
    #[serde(default)]
    pub attacks: Vec<AttackSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    pub mapping: SymbolMapping,
    #[serde(default)]
    pub storage: StorageMode,
}

/// Excess-distortion and power-violation thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Targets {
    /// (D₁, D₂).
    pub distortion: [f64; 2],
    #[serde(default)]
    pub epsilon: f64,
    /// Slack on the power constraint; defaults to `epsilon`.
    #[serde(default)]
    pub power_epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case", deny_unknown_fields)]
pub enum AttackSpec {
    /// Optimal lists by exhaustive search (tiny binary instances).
    Exhaustive {
        d0: f64,
        rates: Vec<f64>,
        #[serde(default)]
        trials: Option<u64>,
    },
    Greedy {
        d0: f64,
        rates: Vec<f64>,
        #[serde(default = "all_candidates")]
        pool: CandidatePool,
        #[serde(default)]
        trials: Option<u64>,
    },
    Keysearch {
        d0: f64,
        #[serde(default)]
        rates: Vec<f64>,
        /// Adds one row at R_n = key rate + residual R-D rate + margin.
        #[serde(default)]
        margin: Option<f64>,
        #[serde(default)]
        quantizer: QuantizerMode,
        #[serde(default)]
        trials: Option<u64>,
    },
    IgnoreZ {
        d0: f64,
        rates: Vec<f64>,
        #[serde(default)]
        quantizer: QuantizerMode,
        #[serde(default)]
        trials: Option<u64>,
    },
}

fn all_candidates() -> CandidatePool {
    CandidatePool::All
}

impl AttackSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AttackSpec::Exhaustive { .. } => "exhaustive",
            AttackSpec::Greedy { .. } => "greedy",
            AttackSpec::Keysearch { .. } => "keysearch",
            AttackSpec::IgnoreZ { .. } => "ignore_z",
        }
    }

    pub fn d0(&self) -> f64 {
        match self {
            AttackSpec::Exhaustive { d0, .. }
            | AttackSpec::Greedy { d0, .. }
            | AttackSpec::Keysearch { d0, .. }
            | AttackSpec::IgnoreZ { d0, .. } => *d0,
        }
    }

    pub fn trials(&self) -> Option<u64> {
        match self {
            AttackSpec::Exhaustive { trials, .. }
            | AttackSpec::Greedy { trials, .. }
            | AttackSpec::Keysearch { trials, .. }
            | AttackSpec::IgnoreZ { trials, .. } => *trials,
        }
    }
}

/// Parses a spec, reporting the JSON path of the first bad field.
pub fn parse_spec(text: &str) -> Result<ExperimentSpec, HarnessError> {
    parse_json(text)
}

pub fn load_spec(path: &Path) -> Result<ExperimentSpec, HarnessError> {
    parse_spec(&read_text(path)?)
}

pub(crate) fn read_text(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

pub(crate) fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, HarnessError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        HarnessError::config(path, e.into_inner().to_string())
    })
}

impl ExperimentSpec {
    /// Checks everything that can be checked without running: schema
    /// version, blocklengths, the model triple at every n, and attack
    /// applicability.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(HarnessError::config(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        if self.scenario.is_empty() {
            return Err(HarnessError::config("scenario", "must be nonempty"));
        }
        if self.n.is_empty() {
            return Err(HarnessError::config("n", "list at least one blocklength"));
        }
        if self.trials == 0 {
            return Err(HarnessError::config("trials", "must be >= 1"));
        }
        for (i, &n) in self.n.iter().enumerate() {
            self.system(n).map_err(|e| match e {
                HarnessError::Config { path, message } if path == "n" => {
                    HarnessError::config(format!("n[{i}]"), message)
                }
                other => other,
            })?;
        }
        if let Some(t) = &self.targets {
            for (j, d) in t.distortion.iter().enumerate() {
                if !(d.is_finite() && *d >= 0.0) {
                    return Err(HarnessError::config(format!("targets.distortion[{j}]"), "must be >= 0"));
                }
            }
            if !(t.epsilon >= 0.0) || t.power_epsilon.is_some_and(|e| !(e >= 0.0)) {
                return Err(HarnessError::config("targets.epsilon", "must be >= 0"));
            }
        }
        for (i, attack) in self.attacks.iter().enumerate() {
            self.check_attack(attack).map_err(|m| HarnessError::config(format!("attacks[{i}]"), m))?;
        }
        Ok(())
    }

    fn check_attack(&self, attack: &AttackSpec) -> Result<(), String> {
        let binary_permutation =
            matches!(self.source, SourceKind::Bernoulli { .. }) && self.scheme.kind == SchemeKind::Permutation;
        if matches!(self.source, SourceKind::VectorGaussian { .. }) {
            return Err(format!("{} does not apply to vector sources", attack.name()));
        }
        if matches!(attack, AttackSpec::Exhaustive { .. } | AttackSpec::Greedy { .. }) && !binary_permutation {
            return Err(format!("{} needs the binary permutation scheme", attack.name()));
        }
        if !(attack.d0().is_finite() && attack.d0() >= 0.0) {
            return Err("d0 must be >= 0".into());
        }
        let rates = match attack {
            AttackSpec::Exhaustive { rates, .. }
            | AttackSpec::Greedy { rates, .. }
            | AttackSpec::Keysearch { rates, .. }
            | AttackSpec::IgnoreZ { rates, .. } => rates,
        };
        if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err("rates must be finite and >= 0".into());
        }
        if let AttackSpec::Keysearch { rates, margin, .. } = attack {
            if rates.is_empty() && margin.is_none() {
                return Err("keysearch needs `rates` or `margin`".into());
            }
        }
        if attack.trials() == Some(0) {
            return Err("trials must be >= 1".into());
        }
        Ok(())
    }

    pub fn source_model(&self) -> Result<SourceModel, HarnessError> {
        Ok(SourceModel::with_default_distortion(self.source.clone()).map_err(|e| e.within("source"))?)
    }

    pub fn system(&self, n: usize) -> Result<System, HarnessError> {
        let params = SchemeParams::new(n, self.key_rate, self.scheme.mapping.clone())?;
        Ok(System::new(self.source_model()?, self.channel.clone(), params)?)
    }

    pub fn build_scheme(&self, n: usize, seed: u64) -> Result<SchemeInstance, HarnessError> {
        let codebook_seed = mix(stream_seed(seed, &self.scenario, n), label_hash("codebook"));
        Ok(SchemeInstance::build(self.scheme.kind, self.system(n)?, codebook_seed, self.scheme.storage)?)
    }
}

/// Seed of every stream used at blocklength n: a pure function of the
/// master seed, the scenario id and n. Trial t then runs on
/// `KeyedRng::new(stream_seed(..), t)`.
pub fn stream_seed(master: u64, scenario: &str, n: usize) -> u64 {
    mix(mix(master, label_hash(scenario)), n as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BINARY: &str = r#"{
        "schema_version": 1,
        "scenario": "binary",
        "source": {"kind": "bernoulli", "p": 0.5},
        "channel": {"kind": "binary_symmetric", "crossover": [0.1, 0.1, 0.2]},
        "scheme": {"kind": "permutation", "mapping": {"kind": "binary_test_channel", "crossover": 0.05}},
        "n": [100],
        "R_K": 0.5,
        "trials": 10
    }"#;

    #[test]
    fn parses_and_validates() {
        let spec = parse_spec(BINARY).unwrap();
        assert_eq!(spec.key_rate, 0.5);
        spec.validate().unwrap();
    }

    #[test]
    fn reports_field_paths() {
        let bad = BINARY.replace("\"p\": 0.5", "\"p\": \"half\"");
        match parse_spec(&bad) {
            Err(HarnessError::Config { path, .. }) => assert_eq!(path, "source"),
            other => panic!("{other:?}"),
        }
        let bad = BINARY.replace("\"crossover\": 0.05", "\"crossover\": 0.7");
        match parse_spec(&bad).unwrap().validate() {
            Err(HarnessError::Config { path, .. }) => assert_eq!(path, "scheme.crossover"),
            other => panic!("{other:?}"),
        }
        let bad = BINARY.replace("\"trials\": 10", "\"trials\": 10, \"extra\": 1");
        assert!(matches!(parse_spec(&bad), Err(HarnessError::Config { .. })));
        let bad = BINARY.replace("\"n\": [100]", "\"n\": [100, 0]");
        match parse_spec(&bad).unwrap().validate() {
            Err(HarnessError::Config { path, .. }) => assert_eq!(path, "n[1]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn attack_applicability() {
        let gaussian = r#"{
            "schema_version": 1, "scenario": "g",
            "source": {"kind": "gaussian", "variance": 1.0},
            "channel": {"kind": "awgn", "noise": [1.0, 1.0, 3.0], "power": 1.0},
            "scheme": {"kind": "orthogonal", "mapping": {"kind": "linear", "power": 1.0}},
            "n": [16], "key_rate": 0.25, "trials": 4,
            "attacks": [{"strategy": "exhaustive", "d0": 0.1, "rates": [0.0]}]
        }"#;
        match parse_spec(gaussian).unwrap().validate() {
            Err(HarnessError::Config { path, .. }) => assert_eq!(path, "attacks[0]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn streams_depend_on_every_input() {
        let a = stream_seed(1, "x", 10);
        assert_ne!(a, stream_seed(2, "x", 10));
        assert_ne!(a, stream_seed(1, "y", 10));
        assert_ne!(a, stream_seed(1, "x", 11));
        assert_eq!(a, stream_seed(1, "x", 10));
    }
}

//! Attack tables: every configured strategy at every blocklength and list
//! rate, with the achievable-region cap for reference.

use std::path::Path;

use serde::{Deserialize, Serialize};
use uncoded_secrecy::adversary::{
    exhaustive_henchman, greedy_value, ignore_z_attack, keysearch_attack, simulate_list_attack, AttackBudget,
    AttackError, AttackResult, BinaryInstance, HenchmanCode,
};
use uncoded_secrecy::models::{label_hash, mix, BroadcastChannel, SourceKind, SymbolMapping, System};
use uncoded_secrecy::regions::{binary_inner_cap, gaussian_inner_cap};
use uncoded_secrecy::scheme::SchemeInstance;

use crate::config::{stream_seed, AttackSpec, ExperimentSpec};
use crate::output::{ensure_dir, fmt_f64, fmt_opt, write_csv, write_json};
use crate::{HarnessError, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackRow {
    pub schema_version: u32,
    pub scenario: String,
    pub key_rate: f64,
    #[serde(flatten)]
    pub result: AttackResult,
    /// Exact success of the list code (exhaustive and greedy only).
    pub exact: Option<f64>,
    /// Largest list rate the scheme provably withstands at this D₀, from
    /// the inner bound; `None` for vector sources.
    pub predicted_cap: Option<f64>,
}

pub const CSV_HEADER: [&str; 15] = [
    "schema_version",
    "scenario",
    "n",
    "key_rate",
    "strategy",
    "R_n",
    "D0",
    "success",
    "ci_low",
    "ci_high",
    "successes",
    "trials",
    "seed",
    "exact",
    "predicted_cap",
];

impl AttackRow {
    fn csv(&self) -> Vec<String> {
        let r = &self.result;
        vec![
            self.schema_version.to_string(),
            self.scenario.clone(),
            r.n.to_string(),
            fmt_f64(self.key_rate),
            r.strategy.clone(),
            fmt_f64(r.list_rate),
            fmt_f64(r.d0),
            fmt_f64(r.success),
            fmt_f64(r.ci_low),
            fmt_f64(r.ci_high),
            r.successes.to_string(),
            r.trials.to_string(),
            r.seed.to_string(),
            fmt_opt(self.exact),
            fmt_opt(self.predicted_cap),
        ]
    }
}

/// Inner-bound cap R_L at distortion D₀ for the configured system.
pub fn predicted_cap(system: &System, key_rate: f64, d0: f64) -> Option<f64> {
    match (&system.source.kind, &system.channel, &system.params.mapping) {
        (SourceKind::Bernoulli { .. }, BroadcastChannel::BinarySymmetric { crossover }, SymbolMapping::BinaryTestChannel { crossover: p }) => {
            Some(binary_inner_cap(key_rate, d0, *p, crossover))
        }
        (SourceKind::Gaussian { variance }, BroadcastChannel::Awgn { noise, .. }, SymbolMapping::Linear { power }) => {
            Some(gaussian_inner_cap(key_rate, d0, *variance, *power, noise[0]))
        }
        _ => None,
    }
}

/// Seed for row `row` of attack `index` at blocklength n.
pub fn attack_seed(master: u64, scenario: &str, n: usize, index: usize, row: usize) -> u64 {
    let base = mix(stream_seed(master, scenario, n), label_hash("attack"));
    mix(mix(base, index as u64), row as u64)
}

pub fn run_attacks(spec: &ExperimentSpec, seed: u64) -> Result<Vec<AttackRow>, HarnessError> {
    spec.validate()?;
    let mut rows = Vec::new();
    if spec.attacks.is_empty() {
        return Ok(rows);
    }
    for &n in &spec.n {
        let scheme = spec.build_scheme(n, seed)?;
        let needs_instance = spec
            .attacks
            .iter()
            .any(|a| matches!(a, AttackSpec::Exhaustive { .. } | AttackSpec::Greedy { .. }));
        let instance = match (&scheme, needs_instance) {
            (SchemeInstance::Permutation(p), true) => Some(BinaryInstance::new(p)?),
            _ => None,
        };
        for (i, attack) in spec.attacks.iter().enumerate() {
            let trials = attack.trials().unwrap_or(spec.trials);
            let budgets = budgets(attack);
            for (j, budget) in budgets.into_iter().enumerate() {
                let row_seed = attack_seed(seed, &spec.scenario, n, i, j);
                let (result, exact) = run_one(&scheme, instance.as_ref(), attack, budget, trials, row_seed)?;
                rows.push(AttackRow {
                    schema_version: SCHEMA_VERSION,
                    scenario: spec.scenario.clone(),
                    key_rate: spec.key_rate,
                    predicted_cap: predicted_cap(scheme.system(), spec.key_rate, result.d0),
                    result,
                    exact,
                });
            }
        }
    }
    Ok(rows)
}

fn budgets(attack: &AttackSpec) -> Vec<AttackBudget> {
    match attack {
        AttackSpec::Keysearch { rates, margin, .. } => rates
            .iter()
            .map(|&r| AttackBudget::ListRate(r))
            .chain(margin.map(AttackBudget::Margin))
            .collect(),
        AttackSpec::Exhaustive { rates, .. } | AttackSpec::Greedy { rates, .. } | AttackSpec::IgnoreZ { rates, .. } => {
            rates.iter().map(|&r| AttackBudget::ListRate(r)).collect()
        }
    }
}

fn run_one(
    scheme: &SchemeInstance,
    instance: Option<&BinaryInstance>,
    attack: &AttackSpec,
    budget: AttackBudget,
    trials: u64,
    seed: u64,
) -> Result<(AttackResult, Option<f64>), AttackError> {
    let rate = match budget {
        AttackBudget::ListRate(r) => r,
        AttackBudget::Margin(_) => f64::NAN,
    };
    let list_code = |code: HenchmanCode| -> Result<(AttackResult, Option<f64>), AttackError> {
        let SchemeInstance::Permutation(p) = scheme else {
            return Err(AttackError::Inapplicable("list codes need the binary permutation scheme".into()));
        };
        let exact = code.success;
        Ok((simulate_list_attack(p, &code, trials, seed)?, Some(exact)))
    };
    let need_instance = || instance.ok_or_else(|| AttackError::Inapplicable("binary permutation scheme required".into()));
    match attack {
        AttackSpec::Exhaustive { d0, .. } => list_code(exhaustive_henchman(need_instance()?, *d0, rate)?),
        AttackSpec::Greedy { d0, pool, .. } => list_code(greedy_value(need_instance()?, *d0, rate, *pool)?),
        AttackSpec::Keysearch { d0, quantizer, .. } => {
            Ok((keysearch_attack(scheme, *d0, budget, *quantizer, trials, seed)?, None))
        }
        AttackSpec::IgnoreZ { d0, quantizer, .. } => {
            let system = scheme.system();
            Ok((ignore_z_attack(&system.source, system.n(), *d0, rate, *quantizer, trials, seed)?, None))
        }
    }
}

/// Writes `attacks.csv` and `attacks.json`.
pub fn write_attack_table(dir: &Path, rows: &[AttackRow]) -> Result<(), HarnessError> {
    ensure_dir(dir)?;
    let csv: Vec<Vec<String>> = rows.iter().map(AttackRow::csv).collect();
    write_csv(&dir.join("attacks.csv"), &CSV_HEADER, &csv)?;
    write_json(&dir.join("attacks.json"), rows)
}

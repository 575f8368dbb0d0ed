use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use uncoded_secrecy_harness::config::{load_spec, ExperimentSpec};
use uncoded_secrecy_harness::region::{answer_query, load_query, write_answer, write_preset, Preset};
use uncoded_secrecy_harness::verify::{verify_lemmas, write_report, Group, Verdict};
use uncoded_secrecy_harness::{attacks, simulate, HarnessError};

#[derive(Parser)]
#[command(name = "uncoded-secrecy", version, about = "Uncoded secrecy experiments: simulation, attacks, regions, lemma checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed; overrides the `seed` field of the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo distortion and power statistics per blocklength.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Attack success table across list rates.
    Attack {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Region preset surface, or a single-point query from `--config`.
    Region {
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        preset: Option<Preset>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Statistical lemma suite; exits 2 if any check fails.
    Verify {
        /// Run only these groups (repeatable).
        #[arg(long, value_enum)]
        only: Vec<Group>,
        #[command(flatten)]
        common: Common,
    },
}

fn load(config: &Path, seed: Option<u64>) -> Result<(ExperimentSpec, u64), HarnessError> {
    let spec = load_spec(config)?;
    spec.validate()?;
    let seed = seed.unwrap_or(spec.seed);
    Ok((spec, seed))
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Simulate { config, common } => {
            let (spec, seed) = load(&config, common.seed)?;
            let report = simulate::run_simulation(&spec, seed, Some(&common.out_dir))?;
            for s in &report.summaries {
                println!(
                    "n={} trials={} mean_d=({}, {}) mean_power={}",
                    s.n, s.trials, s.mean_distortion[0], s.mean_distortion[1], s.power.mean
                );
            }
            println!("wrote {}", common.out_dir.join("simulation.json").display());
        }
        Command::Attack { config, common } => {
            let (spec, seed) = load(&config, common.seed)?;
            let rows = attacks::run_attacks(&spec, seed)?;
            attacks::write_attack_table(&common.out_dir, &rows)?;
            for r in &rows {
                let a = &r.result;
                println!("{} n={} R_n={} D0={} success={}", a.strategy, a.n, a.list_rate, a.d0, a.success);
            }
            println!("wrote {} rows to {}", rows.len(), common.out_dir.join("attacks.csv").display());
        }
        Command::Region { preset, config, common } => {
            let path = match (preset, config) {
                (Some(p), _) => write_preset(p, &common.out_dir)?,
                (None, Some(c)) => {
                    let answer = answer_query(&load_query(&c)?)?;
                    println!(
                        "inner={} outer={} optimal={}",
                        answer.verdict.inner_member, answer.verdict.outer_member, answer.optimality.optimal
                    );
                    write_answer(&answer, &common.out_dir)?
                }
                (None, None) => return Err(HarnessError::config("preset", "give --preset or --config")),
            };
            println!("wrote {}", path.display());
        }
        Command::Verify { only, common } => {
            let groups = if only.is_empty() { Group::ALL.to_vec() } else { only };
            let report = verify_lemmas(&groups, common.seed.unwrap_or(0))?;
            write_report(&report, &common.out_dir)?;
            for c in &report.checks {
                let v = if c.verdict == Verdict::Pass { "PASS" } else { "FAIL" };
                println!("{v} {} statistic={} threshold={}", c.name, c.statistic, c.threshold);
            }
            if !report.passed {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

//! Region presets and single-point queries.

use std::path::Path;

use serde::{Deserialize, Serialize};
use uncoded_secrecy::regions::{
    binary_inner, binary_inner_cap, binary_optimality, binary_outer, binary_outer_cap, gaussian_inner,
    gaussian_inner_cap, gaussian_optimality, gaussian_outer, linspace, sign_change_upper, sweep_region, Cell,
    OptimalityVerdict, RegionCurve, RegionPoint, RegionVerdict,
};

use crate::config::{parse_json, read_text};
use crate::output::{ensure_dir, write_json};
use crate::{HarnessError, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Gaussian inner-bound surface R_L(R_K, D₀), λ = 1, P' = 1.
    Fig2,
    /// Proposed cap vs sign-change cap, λ = 1, N₀ = 0, R_K = 1.
    Fig5,
    /// Binary optimality map over (p₀, D₀).
    BinaryOpt,
}

impl Preset {
    pub fn file_name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2.csv",
            Preset::Fig5 => "fig5.csv",
            Preset::BinaryOpt => "binary_opt.csv",
        }
    }
}

pub const FIG2_KEY_RATES: usize = 21;
pub const FIG2_DISTORTIONS: usize = 50;
/// Wiretapper noise for the Fig. 2 surface.
pub const FIG2_N0: f64 = 1.0;
pub const FIG5_POINTS: usize = 200;
pub const BINARY_OPT_SIDE: usize = 51;
/// User crossovers and key rate of the binary optimality map.
pub const BINARY_OPT_USERS: [f64; 2] = [0.1, 0.2];
pub const BINARY_OPT_KEY_RATE: f64 = 0.5;

fn schema() -> Cell {
    Cell::Num(SCHEMA_VERSION as f64)
}

/// Evaluates a rectangular grid through a flattened row-major index.
fn surface<F>(columns: &[&str], xs: &[f64], ys: &[f64], eval: F) -> Result<RegionCurve, HarnessError>
where
    F: Fn(f64, f64) -> Result<Vec<Cell>, uncoded_secrecy::regions::RegionError> + Sync,
{
    let index: Vec<f64> = (0..xs.len() * ys.len()).map(|i| i as f64).collect();
    let width = ys.len();
    Ok(sweep_region(columns, &index, |i| {
        let i = i as usize;
        eval(xs[i / width], ys[i % width])
    })?)
}

pub fn fig2() -> Result<RegionCurve, HarnessError> {
    let key_rates = linspace(0.0, 2.0, FIG2_KEY_RATES);
    let d0 = linspace(0.02, 1.0, FIG2_DISTORTIONS);
    surface(&["schema_version", "R_K", "D0", "R_L_cap"], &key_rates, &d0, |rk, d| {
        Ok(vec![schema(), rk.into(), d.into(), gaussian_inner_cap(rk, d, 1.0, 1.0, FIG2_N0).into()])
    })
}

pub fn fig5() -> Result<RegionCurve, HarnessError> {
    let d0 = linspace(1.0 / FIG5_POINTS as f64, 1.0, FIG5_POINTS);
    Ok(sweep_region(
        &["schema_version", "D0", "proposed_cap", "sign_change_cap"],
        &d0,
        |d| {
            Ok(vec![
                schema(),
                d.into(),
                gaussian_inner_cap(1.0, d, 1.0, 1.0, 0.0).into(),
                sign_change_upper(d, 1.0, 1.0, 0.0)?.into(),
            ])
        },
    )?)
}

/// Optimality map for p' = 0 with D_i = p_i: which branch fires at each
/// (p₀, D₀), and the inner / outer caps when it does.
pub fn binary_opt() -> Result<RegionCurve, HarnessError> {
    let p0 = linspace(0.0, 0.5, BINARY_OPT_SIDE);
    let d0 = linspace(0.0, 0.5, BINARY_OPT_SIDE);
    let [p1, p2] = BINARY_OPT_USERS;
    let columns = ["schema_version", "p0", "D0", "optimal", "user", "branch", "inner_cap", "outer_cap"];
    surface(&columns, &p0, &d0, |p, d| {
        let crossover = [p, p1, p2];
        let point = RegionPoint::new(BINARY_OPT_KEY_RATE, 0.0, d, p1, p2)?;
        let v = binary_optimality(&point, &crossover)?;
        let (user, branch) = v.fired.map_or((0.0, 0.0), |(u, b)| (u as f64, f64::from(b)));
        let inner = binary_inner_cap(BINARY_OPT_KEY_RATE, d, 0.0, &crossover);
        Ok(vec![
            schema(),
            p.into(),
            d.into(),
            v.optimal.into(),
            user.into(),
            branch.into(),
            inner.into(),
            binary_outer_cap(&point, &crossover).into(),
        ])
    })
}

pub fn preset(p: Preset) -> Result<RegionCurve, HarnessError> {
    match p {
        Preset::Fig2 => fig2(),
        Preset::Fig5 => fig5(),
        Preset::BinaryOpt => binary_opt(),
    }
}

pub fn write_preset(p: Preset, dir: &Path) -> Result<std::path::PathBuf, HarnessError> {
    ensure_dir(dir)?;
    let curve = preset(p)?;
    let path = dir.join(p.file_name());
    let mut buf = Vec::new();
    curve.write_csv(&mut buf).map_err(|e| HarnessError::io(&path, e))?;
    std::fs::write(&path, buf).map_err(|e| HarnessError::io(&path, e))?;
    Ok(path)
}

/// Model family of a point query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionFamily {
    /// BSC broadcast with crossovers [p₀, p₁, p₂] and test channel p'.
    Binary { crossover: [f64; 3], p_prime: f64 },
    /// AWGN broadcast with noise [N₀, N₁, N₂], power limit P and
    /// transmit power P' (defaults to P).
    Gaussian {
        variance: f64,
        noise: [f64; 3],
        power: f64,
        #[serde(default)]
        transmit_power: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionQuery {
    pub schema_version: u32,
    pub family: RegionFamily,
    pub point: RegionPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionAnswer {
    pub schema_version: u32,
    pub query: RegionQuery,
    pub verdict: RegionVerdict,
    pub optimality: OptimalityVerdict,
}

pub fn load_query(path: &Path) -> Result<RegionQuery, HarnessError> {
    let q: RegionQuery = parse_json(&read_text(path)?)?;
    if q.schema_version != SCHEMA_VERSION {
        return Err(HarnessError::config(
            "schema_version",
            format!("expected {SCHEMA_VERSION}, got {}", q.schema_version),
        ));
    }
    Ok(q)
}

pub fn answer_query(q: &RegionQuery) -> Result<RegionAnswer, HarnessError> {
    let p = &q.point;
    let (verdict, optimality) = match &q.family {
        RegionFamily::Binary { crossover, p_prime } => (
            RegionVerdict::new(binary_inner(p, *p_prime, crossover)?, binary_outer(p, crossover)?),
            binary_optimality(p, crossover)?,
        ),
        RegionFamily::Gaussian {
            variance,
            noise,
            power,
            transmit_power,
        } => {
            let p_tx = transmit_power.unwrap_or(*power);
            if p_tx > *power * (1.0 + 1e-12) {
                return Err(HarnessError::config("family.transmit_power", "must not exceed `power`"));
            }
            (
                RegionVerdict::new(
                    gaussian_inner(p, p_tx, *variance, noise)?,
                    gaussian_outer(p, *variance, *power, noise)?,
                ),
                gaussian_optimality(p, *variance, *power, noise)?,
            )
        }
    };
    Ok(RegionAnswer {
        schema_version: SCHEMA_VERSION,
        query: q.clone(),
        verdict,
        optimality,
    })
}

pub fn write_answer(a: &RegionAnswer, dir: &Path) -> Result<std::path::PathBuf, HarnessError> {
    ensure_dir(dir)?;
    let path = dir.join("region_point.json");
    write_json(&path, a)?;
    Ok(path)
}

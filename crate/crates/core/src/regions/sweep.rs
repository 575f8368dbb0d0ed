use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::RegionError;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Num(x) if x.is_infinite() => write!(f, "{}", if *x > 0.0 { "inf" } else { "-inf" }),
            Cell::Num(x) => write!(f, "{x}"),
            Cell::Text(s) => write!(f, "{s}"),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(b.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCurve {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl RegionCurve {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::to_string).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[j]).collect())
    }
}

/// `count` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (count - 1) as f64;
            (0..count)
                .map(|k| if k == count - 1 { end } else { start + step * k as f64 })
                .collect()
        }
    }
}

/// Evaluates `eval` at each grid value in parallel; rows keep grid order.
pub fn sweep_region<F>(columns: &[&str], grid: &[f64], eval: F) -> Result<RegionCurve, RegionError>
where
    F: Fn(f64) -> Result<Vec<Cell>, RegionError> + Sync,
{
    let monotone = grid.windows(2).all(|w| w[0] < w[1]) || grid.windows(2).all(|w| w[0] > w[1]);
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) || !monotone {
        return Err(RegionError::Grid);
    }
    let rows = grid.par_iter().map(|&x| eval(x)).collect::<Result<Vec<_>, _>>()?;
    if rows.iter().any(|r| r.len() != columns.len()) {
        return Err(RegionError::Degenerate("row width differs from header".into()));
    }
    Ok(RegionCurve {
        columns: columns.iter().map(|c| c.to_string()).collect(),
        rows,
    })
}

//! Closed-form inner (achievable) and outer bounds on the secrecy region,
//! optimality predicates, and grid sweeps.
//!
//! A point is `(R_K, R_L, D₀, D₁, D₂)`: key rate, list rate granted to the
//! wiretapper, the wiretapper's distortion target and the two users'
//! distortions.

mod binary;
mod gaussian;
mod sweep;

pub use binary::{binary_inner, binary_inner_cap, binary_optimality, binary_outer, binary_outer_cap};
pub use gaussian::{
    gaussian_inner, gaussian_inner_cap, gaussian_optimality, gaussian_outer, gaussian_outer_cap,
    sign_change_upper, sign_change_upper_bound, solve_water_level, vector_gaussian_inner,
    VectorInner,
};
pub use sweep::{linspace, sweep_region, Cell, RegionCurve};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tol;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("`{name}` = {value} is out of range: {reason}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("grid must be nonempty and monotone")]
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub key_rate: f64,
    pub list_rate: f64,
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
}

impl RegionPoint {
    pub fn new(key_rate: f64, list_rate: f64, d0: f64, d1: f64, d2: f64) -> Result<Self, RegionError> {
        let p = RegionPoint {
            key_rate,
            list_rate,
            d0,
            d1,
            d2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), RegionError> {
        for (name, v) in [
            ("R_K", self.key_rate),
            ("R_L", self.list_rate),
            ("D0", self.d0),
            ("D1", self.d1),
            ("D2", self.d2),
        ] {
            if v.is_nan() || v < 0.0 {
                return Err(RegionError::OutOfRange {
                    name,
                    value: v,
                    reason: "coordinates are nonnegative",
                });
            }
        }
        Ok(())
    }

    pub(crate) fn user_distortion(&self, i: usize) -> f64 {
        if i == 1 {
            self.d1
        } else {
            self.d2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    AtLeast,
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub label: String,
    pub value: f64,
    pub limit: f64,
    pub sense: Sense,
    /// Distance to the limit on the feasible side; negative when violated.
    pub slack: f64,
    pub satisfied: bool,
    pub binding: bool,
}

impl Constraint {
    pub fn new(label: impl Into<String>, value: f64, sense: Sense, limit: f64) -> Self {
        let slack = match sense {
            Sense::AtLeast => value - limit,
            Sense::AtMost => limit - value,
        };
        let slack = if slack.is_nan() { 0.0 } else { slack };
        Constraint {
            label: label.into(),
            value,
            limit,
            sense,
            slack,
            satisfied: slack >= -tol::REGION,
            binding: slack.abs() <= tol::REGION,
        }
    }
}

/// Evaluation of one bound (inner or outer) at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundVerdict {
    pub member: bool,
    /// Largest R_L the bound allows at the point's other coordinates.
    pub list_rate_cap: f64,
    pub constraints: Vec<Constraint>,
}

impl BoundVerdict {
    pub(crate) fn from_constraints(list_rate_cap: f64, constraints: Vec<Constraint>) -> Self {
        BoundVerdict {
            member: constraints.iter().all(|c| c.satisfied),
            list_rate_cap,
            constraints,
        }
    }

    pub fn binding(&self) -> Vec<String> {
        self.constraints
            .iter()
            .filter(|c| c.binding)
            .map(|c| c.label.clone())
            .collect()
    }
}

/// Inner and outer verdicts at the same point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub inner_member: bool,
    pub outer_member: bool,
    /// Binding constraints of the inner bound.
    pub binding: Vec<String>,
    pub inner: BoundVerdict,
    pub outer: BoundVerdict,
}

impl RegionVerdict {
    pub fn new(inner: BoundVerdict, outer: BoundVerdict) -> Self {
        RegionVerdict {
            inner_member: inner.member,
            outer_member: outer.member,
            binding: inner.binding(),
            inner,
            outer,
        }
    }

    /// An achievable point must lie in the outer bound.
    pub fn consistent(&self) -> bool {
        !self.inner_member || self.outer_member
    }
}

/// Which optimality condition fired.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityVerdict {
    pub optimal: bool,
    /// (user index, branch 1 or 2) of the first condition that holds.
    pub fired: Option<(usize, u8)>,
    /// Inner and outer R_L caps at the achieving scheme parameter, when the
    /// point is feasible for the inner bound there.
    pub caps: Option<(f64, f64)>,
}

impl OptimalityVerdict {
    /// Whether inner and outer caps coincide (None when not evaluated).
    pub fn caps_agree(&self) -> Option<bool> {
        self.caps.map(|(i, o)| {
            (i.is_infinite() && o.is_infinite() && i == o) || (i - o).abs() <= tol::REGION
        })
    }
}

/// `[x]⁺`.
pub(crate) fn plus(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

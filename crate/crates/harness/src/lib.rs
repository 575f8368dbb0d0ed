//! Experiment runner for the `uncoded-secrecy` toolkit: JSON experiment
//! specs, Monte-Carlo simulation with per-n checkpoints, attack tables,
//! region presets and the lemma verification suite.
//!
//! Every output row or report carries [`SCHEMA_VERSION`]. Runs are
//! deterministic: the same spec and seed produce byte-identical files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attacks;
pub mod config;
mod error;
pub mod output;
pub mod region;
pub mod simulate;
pub mod verify;

pub use error::HarnessError;

/// Version of every file format written by the harness.
pub const SCHEMA_VERSION: u32 = 1;

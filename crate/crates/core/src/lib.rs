//! Secure uncoded broadcast of a memoryless source over a wiretap broadcast
//! channel with a shared secret key.
//!
//! The crate contains:
//!
//! - [`models`]: sources, channels, scheme parameters and seeded randomness.
//! - [`permute`]: the permutation-based uncoded scheme and method-of-types
//!   utilities.
//! - [`ortho`]: the orthogonal-transform scheme (scalar and per-subchannel
//!   vector), the single-letter sign-change scheme and Haar sampling checks.
//! - [`rd`]: rate-distortion machinery (Blahut-Arimoto, conditional R-D,
//!   d-tilted information, typicality, countable-alphabet tail functionals).
//! - [`regions`]: closed-form inner and outer rate regions and the optimality
//!   predicates.
//! - [`scheme`]: one handle over the three keyed codecs.
//! - [`adversary`]: list-reconstruction (henchman) attacks and covering
//!   geometry.
//!
//! All rates are in bits per source symbol.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod codebook;
pub mod models;
pub mod ortho;
pub mod permute;
pub mod rd;
pub mod regions;
pub mod scheme;
pub mod stats;
pub mod tol;

mod error;

pub use error::{Error, Result};

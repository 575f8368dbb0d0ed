//! Numerical tolerances shared across the crate.

/// Max absolute entry of `ΨᵀΨ - I` accepted for an orthogonal matrix.
pub const ORTHOGONALITY: f64 = 1e-8;

/// `| |det Ψ| - 1 |` bound, checked for `n <= DETERMINANT_MAX_N`.
pub const DETERMINANT: f64 = 1e-6;
pub const DETERMINANT_MAX_N: usize = 64;

/// Relative error allowed for norm preservation.
pub const ISOMETRY: f64 = 1e-9;

/// p-value floor used by every statistical check.
pub const P_FLOOR: f64 = 1e-3;

/// Gram-Schmidt pivot norm below which the Gaussian draw is rejected.
pub const PIVOT: f64 = 1e-12;

/// Resampling attempts before Gram-Schmidt gives up.
pub const MAX_RESAMPLES: usize = 100;

/// Sum-to-one slack of a probability vector.
pub const PROBABILITY_SUM: f64 = 1e-12;

/// Slack used when comparing region constraints.
pub const REGION: f64 = 1e-9;

/// Water-level solve accuracy on the distortion equation.
pub const WATER_LEVEL: f64 = 1e-10;

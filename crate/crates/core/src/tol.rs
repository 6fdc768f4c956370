//! Numerical tolerances used across the crate.
//!
//! Absolute tolerances are applied against `max(1, magnitude)` of the data
//! they guard, so that strongly curved models (small radii) are not rejected
//! for rounding noise proportional to their size.

use serde::{Deserialize, Serialize};

/// Construction invariants of tensors (symmetries, trace-freeness).
pub const CONSTRUCTION: f64 = 1e-12;
/// Relative tolerance for cross-identities between independently computed quantities.
pub const IDENTITY_REL: f64 = 1e-11;
/// Input validation (trace of Weyl input, consistency of Ricci with Rm).
pub const INPUT: f64 = 1e-10;
/// Smallest admissible eigenvalue of a metric matrix.
pub const SPD_MIN_EIGEN: f64 = 1e-10;

/// Scale factor `max(1, |x|)` used to turn absolute tolerances into mixed ones.
pub fn scale(x: f64) -> f64 {
    x.abs().max(1.0)
}

/// Tolerances that end up recorded in reports.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub construction: f64,
    pub identity_rel: f64,
    /// Euler-Lagrange residual below which a metric counts as critical when classifying.
    pub classify_residual: f64,
    /// |E| below which a metric counts as Einstein when classifying.
    pub classify_einstein: f64,
    /// Spectral matching tolerance for the t = -1/2 classification.
    pub classify_spectrum: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            construction: CONSTRUCTION,
            identity_rel: IDENTITY_REL,
            classify_residual: 1e-8,
            classify_einstein: 1e-10,
            classify_spectrum: 1e-8,
        }
    }
}

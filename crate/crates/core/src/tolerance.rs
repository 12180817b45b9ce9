//! Numerical tolerances shared by every module.
//!
//! Input validation uses tight absolute thresholds; identities between
//! derived quantities use scale-relative thresholds. All of them live in one
//! [`Tolerances`] value so a run can be reproduced or loosened in one place.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Hermiticity residual relative to the largest entry; trace of states.
    pub input: f64,
    /// Smallest admissible eigenvalue of states and effects.
    pub psd: f64,
    /// Sum of POVM effects versus the identity.
    pub completeness: f64,
    /// Sum of probability weights versus one.
    pub probability_sum: f64,
    /// Probabilities at or below this are off the support.
    pub support_cutoff: f64,
    /// Probabilities below this (but on the support) are flagged.
    pub near_zero_warning: f64,
    /// Relative threshold for derived identities and inequalities.
    pub identity: f64,
    /// Squared errors above `-radicand_clip * scale` are clipped to zero.
    pub radicand_clip: f64,
    /// Relative threshold on squared norms for the errorless conditions.
    pub errorless: f64,
    /// Relative gap under which eigenvalues are merged.
    pub eigen_merge: f64,
    /// Eigensolver residual relative to the operator norm.
    pub eigen_residual: f64,
    /// Guard for strict comparisons against the naive bound.
    pub naive_guard: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        input: 1e-12,
        psd: 1e-10,
        completeness: 1e-9,
        probability_sum: 1e-10,
        support_cutoff: 1e-12,
        near_zero_warning: 1e-8,
        identity: 1e-9,
        radicand_clip: 1e-10,
        errorless: 1e-8,
        eigen_merge: 1e-8,
        eigen_residual: 1e-9,
        naive_guard: 1e-12,
    };

    /// Default set with the identity threshold replaced.
    pub fn with_identity(identity: f64) -> Self {
        Self {
            identity,
            ..Self::DEFAULT
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

use std::time::Instant;

use errgeom_core::{Tolerances, RNG_ALGORITHM};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

/// Provenance block embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: String,
    pub tool_version: String,
    pub subcommand: String,
    /// Command-specific generator settings and inputs.
    pub parameters: serde_json::Value,
    pub rng_algorithm: String,
    pub tolerances: Tolerances,
    pub checks_passed: usize,
    pub checks_failed: usize,
    /// Omitted where output must be byte-for-byte reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: serde_json::Value, tolerances: Tolerances) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            parameters,
            rng_algorithm: RNG_ALGORITHM.to_string(),
            tolerances,
            checks_passed: 0,
            checks_failed: 0,
            wall_time_seconds: None,
        }
    }

    pub fn record(&mut self, ok: bool) {
        if ok {
            self.checks_passed += 1;
        } else {
            self.checks_failed += 1;
        }
    }

    pub fn finish(&mut self, started: Instant) {
        self.wall_time_seconds = Some(started.elapsed().as_secs_f64());
    }

    pub fn passed(&self) -> bool {
        self.checks_failed == 0
    }
}

pub fn tolerances_with(identity: f64) -> anyhow::Result<Tolerances> {
    if !(identity.is_finite() && identity > 0.0) {
        anyhow::bail!("tolerance must be a positive number, got {identity}");
    }
    Ok(Tolerances::with_identity(identity))
}

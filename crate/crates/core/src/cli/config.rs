use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::dimension::Method;

pub const DEFAULT_SEED: u64 = 20240601;

/// Depths used when `--depth` is absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthDefaults {
    pub exponent: usize,
    pub transfer: usize,
    pub boxcount: usize,
    pub limit_set: usize,
    pub quasicircle: usize,
}

impl Default for DepthDefaults {
    fn default() -> Self {
        DepthDefaults {
            exponent: 10,
            transfer: 6,
            boxcount: 7,
            limit_set: 6,
            quasicircle: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Invariance tolerance for quasi-circles, relative to the largest
    /// cover disk at the curve depth.
    pub invariance_factor: f64,
    /// Sample spacing for Fréchet distances.
    pub frechet_resolution: f64,
    /// Slack allowed in the deformation trace.
    pub monotonicity_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            invariance_factor: 2.0,
            frechet_resolution: 0.05,
            monotonicity_slack: 0.02,
        }
    }
}

/// Settings of one invocation; serialized into every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub depth: Option<usize>,
    pub depths: DepthDefaults,
    pub method: Method,
    pub budget: usize,
    pub seed: u64,
    pub deterministic: bool,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub tolerances: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: String::new(),
            depth: None,
            depths: DepthDefaults::default(),
            method: Method::Exponent,
            budget: 100_000,
            seed: DEFAULT_SEED,
            deterministic: false,
            threads: None,
            out: None,
            tolerances: Tolerances::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        for (name, v) in [
            ("invariance_factor", t.invariance_factor),
            ("frechet_resolution", t.frechet_resolution),
            ("monotonicity_slack", t.monotonicity_slack),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Input(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if self.budget == 0 {
            return Err(CliError::Input("budget must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Input("thread count must be positive".into()));
        }
        Ok(())
    }

    pub fn method_depth(&self, method: Method) -> usize {
        self.depth.unwrap_or(match method {
            Method::Exponent => self.depths.exponent,
            Method::Transfer => self.depths.transfer,
            Method::BoxCount => self.depths.boxcount,
        })
    }

    pub fn limit_depth(&self) -> usize {
        self.depth.unwrap_or(self.depths.limit_set)
    }

    pub fn curve_depth(&self) -> usize {
        self.depth.unwrap_or(self.depths.quasicircle)
    }

    pub fn snapshot(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

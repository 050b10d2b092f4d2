//! Tabular Sarsa(λ) with replacing eligibility traces and ε-greedy exploration.

mod schedule;
mod snapshot;
mod table;

pub use schedule::ExplorationSchedule;
pub use snapshot::{parse_snapshot, write_snapshot, Snapshot, SnapshotError, SNAPSHOT_MAGIC};
pub use table::{ActionChoice, QTable, StepDiagnostics, TableSet, TRACE_FLOOR};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RlError {
    #[error("{name} = {value} is outside {range}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("reward must be finite, got {0}")]
    NonFiniteReward(f64),
    #[error("action index {0} out of range")]
    ActionOutOfRange(usize),
    #[error("invalid exploration schedule: {0}")]
    InvalidSchedule(String),
}

/// Learning parameters of the shooter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLearnerConfig", into = "RawLearnerConfig")]
pub struct LearnerConfig {
    alpha: f64,
    gamma: f64,
    lambda: f64,
    schedule: ExplorationSchedule,
}

pub const DEFAULT_ALPHA: f64 = 0.7;
pub const DEFAULT_GAMMA: f64 = 0.5;
pub const DEFAULT_LAMBDA: f64 = 0.9;

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            alpha: DEFAULT_ALPHA,
            gamma: DEFAULT_GAMMA,
            lambda: DEFAULT_LAMBDA,
            schedule: ExplorationSchedule::default(),
        }
    }
}

impl LearnerConfig {
    pub fn new(alpha: f64, gamma: f64, lambda: f64, schedule: ExplorationSchedule) -> Result<Self, RlError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(RlError::InvalidParameter { name: "alpha", value: alpha, range: "(0, 1]" });
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(RlError::InvalidParameter { name: "gamma", value: gamma, range: "[0, 1]" });
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(RlError::InvalidParameter { name: "lambda", value: lambda, range: "[0, 1]" });
        }
        Ok(LearnerConfig { alpha, gamma, lambda, schedule })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn schedule(&self) -> &ExplorationSchedule {
        &self.schedule
    }

    /// Per-step trace decay factor γλ.
    pub fn trace_decay(&self) -> f64 {
        self.gamma * self.lambda
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLearnerConfig {
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default = "default_gamma")]
    gamma: f64,
    #[serde(default = "default_lambda")]
    lambda: f64,
    #[serde(default)]
    schedule: ExplorationSchedule,
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}
fn default_gamma() -> f64 {
    DEFAULT_GAMMA
}
fn default_lambda() -> f64 {
    DEFAULT_LAMBDA
}

impl TryFrom<RawLearnerConfig> for LearnerConfig {
    type Error = RlError;
    fn try_from(raw: RawLearnerConfig) -> Result<Self, RlError> {
        LearnerConfig::new(raw.alpha, raw.gamma, raw.lambda, raw.schedule)
    }
}

impl From<LearnerConfig> for RawLearnerConfig {
    fn from(c: LearnerConfig) -> Self {
        RawLearnerConfig {
            alpha: c.alpha,
            gamma: c.gamma,
            lambda: c.lambda,
            schedule: c.schedule,
        }
    }
}

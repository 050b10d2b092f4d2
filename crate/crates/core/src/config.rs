//! The experiment configuration file: every tunable constant of a run in one TOML
//! document with sections `learner`, `schedule`, `armory`, `priorities`, `map`,
//! `physics`, `opponents` and `harness`. Missing sections fall back to the defaults.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harness::RunConfig;
use crate::rl::{ExplorationSchedule, LearnerConfig, DEFAULT_ALPHA, DEFAULT_GAMMA, DEFAULT_LAMBDA};
use crate::sim::{Arena, MapConfig, OpponentProfile, PhysicsConfig, Rules};
use crate::weapons::{default_armory, Armory, PriorityTables, WeaponSpec};

/// Environment variable that may name the configuration file.
pub const CONFIG_ENV: &str = "SARSA_ARENA_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LearnerSection {
    pub alpha: f64,
    pub gamma: f64,
    pub lambda: f64,
}

impl Default for LearnerSection {
    fn default() -> Self {
        LearnerSection {
            alpha: DEFAULT_ALPHA,
            gamma: DEFAULT_GAMMA,
            lambda: DEFAULT_LAMBDA,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleSection {
    /// `[lives_lower_bound, epsilon]` pairs.
    pub bands: ExplorationSchedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArmorySection {
    pub weapons: Vec<WeaponSpec>,
}

impl Default for ArmorySection {
    fn default() -> Self {
        ArmorySection {
            weapons: default_armory(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpponentsSection {
    /// Scripted opponents per game.
    pub count: usize,
    pub level1: OpponentProfile,
    pub level3: OpponentProfile,
    pub level5: OpponentProfile,
}

impl Default for OpponentsSection {
    fn default() -> Self {
        OpponentsSection {
            count: 3,
            level1: OpponentProfile::level1(),
            level3: OpponentProfile::level3(),
            level5: OpponentProfile::level5(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HarnessSection {
    pub games: u32,
    /// Simulated minutes per game.
    pub minutes: f64,
    /// Multiplies both the game count and the game duration.
    pub scale: f64,
    pub seed: u64,
    /// Keep every k-th death snapshot.
    pub snapshot_every: u64,
    /// Lives per policy in a frozen-policy evaluation.
    pub eval_lives: usize,
    /// Simulated-time cap of one evaluation (minutes).
    pub eval_max_minutes: f64,
}

impl Default for HarnessSection {
    fn default() -> Self {
        HarnessSection {
            games: 30,
            minutes: 3.0,
            scale: 1.0,
            seed: 1,
            snapshot_every: 50,
            eval_lives: 500,
            eval_max_minutes: 600.0,
        }
    }
}

/// A complete, parsed configuration file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub learner: LearnerSection,
    pub schedule: ScheduleSection,
    pub harness: HarnessSection,
    pub opponents: OpponentsSection,
    pub physics: PhysicsConfig,
    pub priorities: PriorityTables,
    pub map: MapConfig,
    pub armory: ArmorySection,
}

impl ExperimentConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            origin: origin.to_string(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Cross-checks everything that serde cannot.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.learner()?;
        self.rules()?;
        let h = &self.harness;
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if !(h.scale > 0.0 && h.scale.is_finite()) {
            return invalid(format!("harness.scale = {} must be positive", h.scale));
        }
        if self.opponents.count == 0 {
            return invalid("opponents.count must be at least 1".into());
        }
        for (level, p) in [(1, &self.opponents.level1), (3, &self.opponents.level3), (5, &self.opponents.level5)] {
            if p.level != level {
                return invalid(format!("opponents.level{level} declares level {}", p.level));
            }
        }
        Ok(())
    }

    pub fn learner(&self) -> Result<LearnerConfig, ConfigError> {
        let l = &self.learner;
        LearnerConfig::new(l.alpha, l.gamma, l.lambda, self.schedule.bands.clone())
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn rules(&self) -> Result<Arc<Rules>, ConfigError> {
        let invalid = |e: String| ConfigError::Invalid(e);
        let armory = Armory::new(self.armory.weapons.clone()).map_err(|e| invalid(e.to_string()))?;
        self.priorities.validate(&armory).map_err(|e| invalid(e.to_string()))?;
        let physics = self.physics.clone();
        physics.validate().map_err(invalid)?;
        Ok(Arc::new(Rules {
            arena: Arena::new(&self.map, &armory).map_err(|e| invalid(e.to_string()))?,
            armory,
            priorities: self.priorities.clone(),
            physics,
        }))
    }

    pub fn opponent(&self, level: u8) -> Option<&OpponentProfile> {
        match level {
            1 => Some(&self.opponents.level1),
            3 => Some(&self.opponents.level3),
            5 => Some(&self.opponents.level5),
            _ => None,
        }
    }

    /// Game count after scaling, at least one.
    pub fn scaled_games(&self) -> u32 {
        ((self.harness.games as f64 * self.harness.scale).round() as u32).max(1)
    }

    pub fn scaled_minutes(&self) -> f64 {
        self.harness.minutes * self.harness.scale
    }

    /// Campaign settings for one opponent level.
    pub fn run_config(&self, level: u8, out_dir: Option<PathBuf>) -> Result<RunConfig, ConfigError> {
        let opponent = self
            .opponent(level)
            .ok_or_else(|| ConfigError::Invalid(format!("level {level} is not one of 1, 3, 5")))?
            .clone();
        let cfg = RunConfig {
            run_id: format!("L{level}-s{}", self.harness.seed),
            level,
            games: self.scaled_games(),
            minutes: self.scaled_minutes(),
            seed: self.harness.seed,
            learner: self.learner()?,
            rules: self.rules()?,
            opponent,
            opponents: self.opponents.count,
            out_dir,
            snapshot_every: self.harness.snapshot_every,
        };
        cfg.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(cfg)
    }
}

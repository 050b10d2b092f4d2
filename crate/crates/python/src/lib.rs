//! Python bindings: state encoding, the Sarsa(λ) table set, snapshots, metrics and
//! whole training campaigns.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sarsa_arena::config::ExperimentConfig;
use sarsa_arena::encoder::{self, CombatObservation, StateId, NUM_STATES};
use sarsa_arena::harness::{self, CampaignOptions, LevelSummary};
use sarsa_arena::rl::{self, ExplorationSchedule, LearnerConfig, TableSet};
use sarsa_arena::weapons::{actions_for, WeaponCategory, NUM_ACTIONS};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn category(name: &str) -> PyResult<WeaponCategory> {
    name.parse().map_err(value_err)
}

fn state(index: usize) -> PyResult<StateId> {
    StateId::new(index).map_err(value_err)
}

/// Discretised state index of one combat observation.
#[pyfunction]
#[pyo3(signature = (distance, rel_velocity, line_of_sight, opponent_jumping, facing_angle, weapon_instant_hit))]
fn encode_state(
    distance: f64,
    rel_velocity: (f64, f64),
    line_of_sight: (f64, f64),
    opponent_jumping: bool,
    facing_angle: f64,
    weapon_instant_hit: bool,
) -> PyResult<usize> {
    let obs = CombatObservation {
        distance,
        rel_velocity: [rel_velocity.0, rel_velocity.1],
        line_of_sight: [line_of_sight.0, line_of_sight.1],
        opponent_jumping,
        facing_angle,
        weapon_instant_hit,
    };
    Ok(encoder::encode(&obs).map_err(value_err)?.index())
}

/// Exploration rate after `lives` deaths under the default schedule.
#[pyfunction]
fn epsilon_for_lives(lives: u64) -> f64 {
    ExplorationSchedule::default().epsilon_for_lives(lives)
}

/// Aim-action labels of a weapon category, in action order.
#[pyfunction]
fn action_labels(category_name: &str) -> PyResult<Vec<&'static str>> {
    Ok(actions_for(category(category_name)?).iter().map(|a| a.label()).collect())
}

#[pyfunction]
fn kd_ratio(kills: u64, deaths_by_others: u64, suicides: u64) -> Option<f64> {
    harness::kd_ratio(kills, deaths_by_others, suicides)
}

#[pyfunction]
fn hit_percentage(hits: f64, misses: f64) -> Option<f64> {
    harness::hit_percentage(hits, misses)
}

#[pyfunction]
#[pyo3(signature = (series, window = 11))]
fn centred_moving_average(series: Vec<f64>, window: usize) -> PyResult<Vec<f64>> {
    harness::centred_moving_average(&series, window).map_err(value_err)
}

/// One Q table per weapon category, updated by Sarsa(λ) with replacing traces.
#[pyclass(name = "Tables")]
struct PyTables {
    inner: TableSet,
    learner: LearnerConfig,
}

#[pymethods]
impl PyTables {
    #[new]
    #[pyo3(signature = (alpha = 0.7, gamma = 0.5, lambda_ = 0.9))]
    fn new(alpha: f64, gamma: f64, lambda_: f64) -> PyResult<Self> {
        Ok(PyTables {
            inner: TableSet::new(),
            learner: LearnerConfig::new(alpha, gamma, lambda_, ExplorationSchedule::default()).map_err(value_err)?,
        })
    }

    /// Restore values from snapshot text; traces start cleared.
    #[staticmethod]
    #[pyo3(signature = (text, alpha = None, gamma = None, lambda_ = None))]
    fn from_snapshot(text: &str, alpha: Option<f64>, gamma: Option<f64>, lambda_: Option<f64>) -> PyResult<Self> {
        let snap = rl::parse_snapshot(text).map_err(value_err)?;
        let (a, g, l) = snap.params;
        let learner = LearnerConfig::new(
            alpha.unwrap_or(a),
            gamma.unwrap_or(g),
            lambda_.unwrap_or(l),
            ExplorationSchedule::default(),
        )
        .map_err(value_err)?;
        Ok(PyTables {
            inner: snap.tables,
            learner,
        })
    }

    fn q(&self, category_name: &str, state_id: usize, action: usize) -> PyResult<f64> {
        if action >= NUM_ACTIONS {
            return Err(value_err(format!("action {action} out of range")));
        }
        Ok(self.inner[category(category_name)?].q(state(state_id)?, action))
    }

    fn q_row(&self, category_name: &str, state_id: usize) -> PyResult<Vec<f64>> {
        Ok(self.inner[category(category_name)?].q_row(state(state_id)?).to_vec())
    }

    fn trace(&self, category_name: &str, state_id: usize, action: usize) -> PyResult<f64> {
        if action >= NUM_ACTIONS {
            return Err(value_err(format!("action {action} out of range")));
        }
        Ok(self.inner[category(category_name)?].trace(state(state_id)?, action))
    }

    /// One Sarsa(λ) step; `next = None` is a terminal successor. Returns the TD error.
    #[pyo3(signature = (current, reward, next = None))]
    fn update(&mut self, current: (String, usize, usize), reward: f64, next: Option<(String, usize, usize)>) -> PyResult<f64> {
        let cur = (category(&current.0)?, state(current.1)?, current.2);
        let nxt = match next {
            Some((c, s, a)) => Some((category(&c)?, state(s)?, a)),
            None => None,
        };
        self.inner.sarsa_update(cur, reward, nxt, &self.learner).map_err(value_err)
    }

    /// Clear all eligibility traces, as at the start of a life.
    fn begin_life(&mut self) {
        self.inner.begin_life();
    }

    fn nonzero_count(&self) -> usize {
        self.inner.nonzero_count()
    }

    fn to_snapshot(&self, lives: u64) -> String {
        let l = &self.learner;
        rl::write_snapshot(&self.inner, lives, (l.alpha(), l.gamma(), l.lambda()))
    }
}

fn summary_dict<'py>(py: Python<'py>, s: &LevelSummary) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("level", s.level)?;
    d.set_item("games", s.games)?;
    d.set_item("lives", s.lives)?;
    d.set_item("kills", s.kills)?;
    d.set_item("deaths_by_others", s.deaths_by_others)?;
    d.set_item("suicides", s.suicides)?;
    d.set_item("kd_ratio", s.kd_ratio)?;
    d.set_item("hit_percentage", s.hit_percentage)?;
    d.set_item("reward_mean", s.reward.map(|r| r.mean))?;
    d.set_item("kills_per_game", s.kills_per_game.mean)?;
    Ok(d)
}

/// Train against one opponent level and return the aggregate summary.
///
/// Settings not given come from `config` (a configuration file) or the defaults.
#[pyfunction]
#[pyo3(signature = (level, games = None, minutes = None, seed = None, out_dir = None, config = None, snapshot_every = None))]
fn run_campaign<'py>(
    py: Python<'py>,
    level: u8,
    games: Option<u32>,
    minutes: Option<f64>,
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    config: Option<PathBuf>,
    snapshot_every: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = match config {
        Some(p) => ExperimentConfig::load(&p).map_err(value_err)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        cfg.harness.seed = s;
    }
    if let Some(k) = snapshot_every {
        cfg.harness.snapshot_every = k;
    }
    let mut run = cfg.run_config(level, out_dir).map_err(value_err)?;
    if let Some(g) = games {
        run.games = g;
    }
    if let Some(m) = minutes {
        run.minutes = m;
    }
    let result = py
        .detach(|| harness::run_campaign(&run, CampaignOptions::default()))
        .map_err(|e| match e {
            harness::HarnessError::Io { .. } | harness::HarnessError::Records(_) => PyIOError::new_err(e.to_string()),
            other => value_err(other),
        })?;
    let summary = harness::summarize(&result.lives, &result.games).map_err(value_err)?;
    let d = summary_dict(py, &summary)?;
    d.set_item("deaths", result.deaths)?;
    d.set_item("snapshots", result.snapshots)?;
    Ok(d)
}

/// Summaries of every campaign directory under `path`.
#[pyfunction]
fn load_reports<'py>(py: Python<'py>, path: PathBuf) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let reports = harness::load_reports(&path).map_err(|e| PyIOError::new_err(e.to_string()))?;
    reports.iter().map(|r| summary_dict(py, &r.summary)).collect()
}

#[pymodule]
fn sarsa_arena_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NUM_STATES", NUM_STATES)?;
    m.add("NUM_ACTIONS", NUM_ACTIONS)?;
    m.add(
        "CATEGORIES",
        WeaponCategory::ALL.iter().map(|c| c.name()).collect::<Vec<_>>(),
    )?;
    m.add_class::<PyTables>()?;
    m.add_function(wrap_pyfunction!(encode_state, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_for_lives, m)?)?;
    m.add_function(wrap_pyfunction!(action_labels, m)?)?;
    m.add_function(wrap_pyfunction!(kd_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(hit_percentage, m)?)?;
    m.add_function(wrap_pyfunction!(centred_moving_average, m)?)?;
    m.add_function(wrap_pyfunction!(run_campaign, m)?)?;
    m.add_function(wrap_pyfunction!(load_reports, m)?)?;
    Ok(())
}

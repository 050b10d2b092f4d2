use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{new_world, step_world};
use crate::rl::{LearnerConfig, RlError, TableSet};
use crate::sim::{OpponentProfile, RlShooter, Rules, ShooterMode};

/// Per-life rewards of a frozen policy over `lives` deaths in one continuous match.
///
/// Tables are only read: traces are cleared but values never change outside
/// [`ShooterMode::Learning`]. Stops early (returning fewer lives) if the match runs for
/// `max_seconds` of simulated time.
pub fn evaluate_policy(
    rules: &Arc<Rules>,
    opponent: &OpponentProfile,
    opponents: usize,
    tables: &TableSet,
    mode: ShooterMode,
    lives: usize,
    seed: u64,
    max_seconds: f64,
) -> Result<Vec<f64>, RlError> {
    let mut tables = tables.clone();
    let learner = LearnerConfig::default();
    let mut world = new_world(rules, opponent, opponents);
    let mut shooter = RlShooter::new(0, mode);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_ticks = (max_seconds * rules.physics.tick_hz) as u64;
    let mut rewards = Vec::with_capacity(lives);
    while rewards.len() < lives && world.tick < max_ticks {
        let (_, ended) = step_world(&mut world, &mut shooter, &mut tables, &learner, &mut rng)?;
        if let Some(stats) = ended {
            rewards.push(stats.reward);
        }
    }
    Ok(rewards)
}

/// Bootstrap interval for `mean(a) - mean(b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub mean_a: f64,
    pub mean_b: f64,
    pub difference: f64,
    pub low: f64,
    pub high: f64,
}

/// Percentile bootstrap of the difference of means, resampling each sample independently.
pub fn bootstrap_mean_difference(a: &[f64], b: &[f64], resamples: usize, confidence: f64, seed: u64) -> Option<Comparison> {
    if a.is_empty() || b.is_empty() || resamples == 0 {
        return None;
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut resample_mean = |v: &[f64]| (0..v.len()).map(|_| v[rng.gen_range(0..v.len())]).sum::<f64>() / v.len() as f64;
    let mut diffs: Vec<f64> = (0..resamples).map(|_| resample_mean(a) - resample_mean(b)).collect();
    diffs.sort_by(f64::total_cmp);
    let tail = (1.0 - confidence) / 2.0;
    let pick = |q: f64| diffs[((q * resamples as f64).floor() as usize).min(resamples - 1)];
    let (ma, mb) = (mean(a), mean(b));
    Some(Comparison {
        mean_a: ma,
        mean_b: mb,
        difference: ma - mb,
        low: pick(tail),
        high: pick(1.0 - tail),
    })
}

//! Training and evaluation campaigns: sequential games against three scripted
//! opponents, per-life and per-game records, snapshots on death, CSV output.

mod eval;
mod metrics;
mod records;
mod report;
mod svg;

pub use eval::{bootstrap_mean_difference, evaluate_policy, Comparison};
pub use metrics::{centred_moving_average, hit_percentage, kd_ratio, summarize, LevelSummary, Stat, SummaryError};
pub use records::{
    read_games, read_lives, CsvLog, GameRecord, LifeEnd, LifeRecord, RecordError, GAMES_FILE, LIVES_FILE,
};
pub use report::{campaign_dirs, load_level, load_reports, LevelReport};
pub use svg::{deaths_plot, kills_plot, streak_plot};

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::rl::{write_snapshot, LearnerConfig, RlError, TableSet};
use crate::sim::{
    scripted_policy, Controller, EventKind, OpponentProfile, RlShooter, Rules, ShooterMode, ShooterStats, SimEvent,
    SuicideCause, World,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Records(#[from] RecordError),
    #[error("{}: {source}", path.display())]
    Summary {
        path: PathBuf,
        #[source]
        source: SummaryError,
    },
    #[error(transparent)]
    Learner(#[from] RlError),
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// One training campaign against a single opponent level.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub run_id: String,
    pub level: u8,
    pub games: u32,
    /// Simulated minutes per game.
    pub minutes: f64,
    pub seed: u64,
    pub learner: LearnerConfig,
    pub rules: Arc<Rules>,
    pub opponent: OpponentProfile,
    pub opponents: usize,
    /// Where CSVs and snapshots go; `None` keeps everything in memory.
    pub out_dir: Option<PathBuf>,
    /// Keep every k-th death snapshot.
    pub snapshot_every: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidConfig(m));
        if ![1, 3, 5].contains(&self.level) {
            return bad(format!("level {} is not one of 1, 3, 5", self.level));
        }
        if self.games == 0 {
            return bad("games must be at least 1".into());
        }
        if !(self.minutes > 0.0 && self.minutes.is_finite()) {
            return bad(format!("game duration {} must be positive", self.minutes));
        }
        if self.snapshot_every == 0 {
            return bad("snapshot_every must be at least 1".into());
        }
        if self.opponents == 0 {
            return bad("at least one opponent is needed".into());
        }
        Ok(())
    }

    fn ticks_per_game(&self) -> u64 {
        (self.minutes * 60.0 * self.rules.physics.tick_hz).round() as u64
    }
}

/// Everything a campaign produced.
#[derive(Debug, Clone)]
pub struct CampaignResult {
    pub lives: Vec<LifeRecord>,
    pub games: Vec<GameRecord>,
    pub snapshots: Vec<PathBuf>,
    /// Deaths of the learner (lives ended by a kill or suicide).
    pub deaths: u64,
    pub tables: TableSet,
    /// Every simulator event per game, when requested.
    pub event_logs: Vec<Vec<SimEvent>>,
}

/// Options that do not affect results.
#[derive(Debug, Clone, Copy, Default)]
pub struct CampaignOptions {
    pub keep_event_logs: bool,
}

pub fn snapshot_name(level: u8, lives: u64) -> String {
    format!("snap_{level}_{lives}.rlsq")
}

/// Play `cfg.games` sequential games; learning carries over between games.
pub fn run_campaign(cfg: &RunConfig, opts: CampaignOptions) -> Result<CampaignResult, HarnessError> {
    cfg.validate()?;
    let mut log = match &cfg.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
            Some(CsvLog::create(dir, &cfg.rules.armory)?)
        }
        None => None,
    };

    let mut tables = TableSet::new();
    let mut shooter = RlShooter::new(0, ShooterMode::Learning);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut result = CampaignResult {
        lives: Vec::new(),
        games: Vec::new(),
        snapshots: Vec::new(),
        deaths: 0,
        tables: TableSet::new(),
        event_logs: Vec::new(),
    };

    for game in 0..cfg.games {
        let mut on_death = |shooter: &RlShooter, tables: &TableSet| -> Result<(), HarnessError> {
            let deaths = shooter.deaths;
            if let Some(dir) = &cfg.out_dir {
                if deaths.is_multiple_of(cfg.snapshot_every) {
                    let path = dir.join(snapshot_name(cfg.level, deaths));
                    let params = (cfg.learner.alpha(), cfg.learner.gamma(), cfg.learner.lambda());
                    fs::write(&path, write_snapshot(tables, deaths, params)).map_err(io_err(&path))?;
                    result.snapshots.push(path);
                }
            }
            Ok(())
        };
        let played = play_game(cfg, game, &mut tables, &mut shooter, &mut rng, opts, &mut on_death)?;
        let first_life = result.lives.len() as u64;
        for (i, mut life) in played.lives.into_iter().enumerate() {
            life.life = first_life + i as u64;
            if let Some(log) = &mut log {
                log.append_life(&life)?;
            }
            result.lives.push(life);
        }
        if let Some(log) = &mut log {
            log.append_game(&played.game)?;
        }
        result.games.push(played.game);
        if opts.keep_event_logs {
            result.event_logs.push(played.events);
        }
    }
    result.deaths = shooter.deaths;
    result.tables = tables;
    Ok(result)
}

struct PlayedGame {
    lives: Vec<LifeRecord>,
    game: GameRecord,
    events: Vec<SimEvent>,
}

/// Fresh arena with the learner (agent 0) and the scripted opponents.
pub fn new_world(rules: &Arc<Rules>, opponent: &OpponentProfile, opponents: usize) -> World {
    let mut world = World::new(Arc::clone(rules));
    world.add_agent(Controller::Rl);
    for _ in 0..opponents {
        world.add_agent(Controller::Scripted(opponent.clone()));
    }
    world
}

/// Run the controllers for one tick and advance the world.
pub fn step_world(
    world: &mut World,
    shooter: &mut RlShooter,
    tables: &mut TableSet,
    learner: &LearnerConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<SimEvent>, Option<ShooterStats>), RlError> {
    let physics = &world.rules.physics;
    let (scripted_every, decision_every) = (physics.scripted_every as u64, physics.decision_every as u64);
    let t = world.tick;
    if t.is_multiple_of(scripted_every) {
        for id in 0..world.agents.len() {
            if id == shooter.agent || !world.agents[id].alive {
                continue;
            }
            let d = scripted_policy(world, id, rng);
            let a = &mut world.agents[id];
            a.control = d.control;
            a.nav = d.nav;
            a.memory = d.memory;
        }
        shooter.steer(world, rng);
    }
    if t.is_multiple_of(decision_every) {
        shooter.decide(world, tables, learner, rng)?;
    }
    let dt = world.dt();
    let events = world.tick(dt, rng);
    let ended = shooter.observe(world, &events, tables, learner, rng)?;
    Ok((events, ended))
}

fn play_game(
    cfg: &RunConfig,
    game: u32,
    tables: &mut TableSet,
    shooter: &mut RlShooter,
    rng: &mut ChaCha8Rng,
    opts: CampaignOptions,
    on_death: &mut dyn FnMut(&RlShooter, &TableSet) -> Result<(), HarnessError>,
) -> Result<PlayedGame, HarnessError> {
    let mut world = new_world(&cfg.rules, &cfg.opponent, cfg.opponents);
    let me = shooter.agent;
    let dt = world.dt();
    let armory_len = cfg.rules.armory.len();
    let mut record = GameRecord {
        run_id: cfg.run_id.clone(),
        game,
        level: cfg.level,
        kills: 0,
        deaths_by_others: 0,
        suicides: 0,
        max_kill_streak: 0,
        weapons_collected: 0,
        ammo_collected: 0,
        time_moving_s: 0.0,
        distance_uu: 0.0,
        shoot_s_total: 0.0,
        shoot_s: vec![0.0; armory_len],
    };
    let mut lives = Vec::new();
    let mut events_log = Vec::new();
    let mut streak = 0u64;
    let mut life_ticks = 0u64;

    for _ in 0..cfg.ticks_per_game() {
        if let Some(fire) = world.agents[me].control.fire.filter(|_| world.agents[me].alive) {
            record.shoot_s[fire.weapon] += dt;
            record.shoot_s_total += dt;
        }
        let (events, ended) = step_world(&mut world, shooter, tables, &cfg.learner, rng)?;
        let agent = &world.agents[me];
        if agent.alive {
            life_ticks += 1;
            let speed = agent.velocity[0].hypot(agent.velocity[1]);
            if speed > 1.0 {
                record.time_moving_s += dt;
                record.distance_uu += speed * dt;
            }
        }
        let mut cause = None;
        for e in &events {
            match e.kind {
                EventKind::Kill { killer, victim } if killer == me && victim != me => {
                    record.kills += 1;
                    streak += 1;
                    record.max_kill_streak = record.max_kill_streak.max(streak);
                }
                EventKind::Kill { victim, .. } if victim == me => {
                    record.deaths_by_others += 1;
                    cause = Some(LifeEnd::Killed);
                }
                EventKind::Suicide { victim, cause: c } if victim == me => {
                    record.suicides += 1;
                    cause = Some(match c {
                        SuicideCause::Pit => LifeEnd::SuicidePit,
                        SuicideCause::SelfSplash => LifeEnd::SuicideSplash,
                    });
                }
                EventKind::Pickup { agent, kind, .. } if agent == me => match kind {
                    crate::sim::PickupKind::Weapon => record.weapons_collected += 1,
                    crate::sim::PickupKind::Ammo => record.ammo_collected += 1,
                },
                _ => {}
            }
        }
        if let Some(stats) = ended {
            streak = 0;
            lives.push(life_record(cfg, game, &stats, life_ticks as f64 * dt, cause.expect("death event")));
            life_ticks = 0;
            on_death(shooter, tables)?;
        }
        if opts.keep_event_logs {
            events_log.extend(events);
        }
    }
    let stats = shooter.end_game(tables);
    if world.agents[me].alive {
        lives.push(life_record(cfg, game, &stats, life_ticks as f64 * dt, LifeEnd::GameEnd));
    }
    Ok(PlayedGame {
        lives,
        game: record,
        events: events_log,
    })
}

fn life_record(cfg: &RunConfig, game: u32, stats: &ShooterStats, duration_s: f64, cause: LifeEnd) -> LifeRecord {
    LifeRecord {
        run_id: cfg.run_id.clone(),
        game,
        life: 0,
        level: cfg.level,
        hits: stats.hits,
        misses: stats.misses,
        reward: stats.reward,
        duration_s,
        death_cause: cause,
    }
}

#[cfg(test)]
mod tests;

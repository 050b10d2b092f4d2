use rand::Rng;

use super::agent::{AgentId, AimCommand, FireCommand};
use super::events::EventKind;
use super::World;
use crate::encoder::{discretize_distance, encode, normalize_degrees, CombatObservation, StateId};
use crate::geometry::heading_deg;
use crate::rl::{LearnerConfig, QTable, RlError, StepDiagnostics, TableSet};
use crate::weapons::{action, reward_for, resolve_aim, select_weapon, AimTarget, WeaponCategory, WeaponId};

/// How the learning bot picks actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShooterMode {
    /// ε-greedy selection with Sarsa(λ) updates.
    Learning,
    /// Frozen greedy policy, no updates.
    Greedy,
    /// Uniform random actions, no updates.
    Random,
}

/// Per-life shooting statistics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ShooterStats {
    /// Resolved shots that damaged someone else.
    pub hits: u64,
    pub misses: u64,
    /// Damage dealt minus penalised decision intervals.
    pub reward: f64,
    pub decisions: u64,
    pub exploratory: u64,
    pub updates: u64,
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    category: WeaponCategory,
    state: StateId,
    action: usize,
    weapon: WeaponId,
    target: AgentId,
    exploratory: bool,
}

/// The learning bot's shooting controller.
///
/// A decision opens an interval that lasts until the next decision with a visible
/// opponent. Closing an interval in which the bot fired or dealt damage yields one
/// learning step with reward = damage dealt, or the miss penalty when it fired without
/// damaging anyone. While the chosen weapon has not fired yet the previous action is
/// kept instead of re-deciding, so slow weapons get one decision per shot.
#[derive(Debug, Clone)]
pub struct RlShooter {
    pub agent: AgentId,
    pub mode: ShooterMode,
    /// Lives ended by death so far; drives the exploration schedule.
    pub deaths: u64,
    pending: Option<Pending>,
    fired: bool,
    damage: f64,
    first_shot_of_life: u64,
    stats: ShooterStats,
    dodge: bool,
    last_step: Option<StepDiagnostics>,
}

impl RlShooter {
    pub fn new(agent: AgentId, mode: ShooterMode) -> Self {
        RlShooter {
            agent,
            mode,
            deaths: 0,
            pending: None,
            fired: false,
            damage: 0.0,
            first_shot_of_life: 0,
            stats: ShooterStats::default(),
            dodge: false,
            last_step: None,
        }
    }

    pub fn stats(&self) -> &ShooterStats {
        &self.stats
    }

    /// Diagnostics of the most recent learning step.
    pub fn last_step(&self) -> Option<StepDiagnostics> {
        self.last_step
    }

    /// Movement update: waypoint navigation plus an occasional dodge jump after being hit.
    pub fn steer<R: Rng + ?Sized>(&mut self, world: &mut World, rng: &mut R) {
        let me = self.agent;
        if !world.agents[me].alive {
            return;
        }
        let (movement, nav) = super::navigate(world, me, rng);
        let agent = &mut world.agents[me];
        agent.control.movement = movement;
        agent.nav = nav;
        if std::mem::take(&mut self.dodge) && !agent.is_jumping() {
            let side = rng.gen_range(-180.0..180.0_f64).to_radians();
            agent.control.jump = Some([side.cos() * agent.max_speed, side.sin() * agent.max_speed]);
        }
    }

    /// Shooting decision; does nothing unless an opponent is in view.
    pub fn decide<R: Rng + ?Sized>(
        &mut self,
        world: &mut World,
        tables: &mut TableSet,
        cfg: &LearnerConfig,
        rng: &mut R,
    ) -> Result<(), RlError> {
        let me = self.agent;
        if !world.agents[me].alive {
            return Ok(());
        }
        let physics = &world.rules.physics;
        let target = world
            .agents
            .iter()
            .filter(|o| world.can_see(me, o.id, physics.rl_view_half_angle))
            .min_by(|a, b| {
                let p = world.agents[me].position;
                a.position.planar_distance(p).total_cmp(&b.position.planar_distance(p))
            })
            .map(|o| o.id);
        let Some(target) = target else {
            let alert = world.agents[me].last_damage.map(|d| d.attacker).filter(|&a| {
                a != me && world.agents[a].alive && world.has_line_of_sight(me, a)
            });
            let face = alert.map(|a| {
                let (p, q) = (world.agents[me].position, world.agents[a].position);
                heading_deg([q.x - p.x, q.y - p.y])
            });
            let agent = &mut world.agents[me];
            agent.control.fire = None;
            agent.control.face_yaw = face;
            return Ok(());
        };

        let agent = &world.agents[me];
        let opponent = &world.agents[target];
        let distance = agent.position.planar_distance(opponent.position);
        if distance <= 0.0 {
            return Ok(());
        }
        let band = discretize_distance(distance).expect("finite distance");
        let Ok(weapon) = select_weapon(&agent.inventory, band, &world.rules.priorities, &world.rules.armory) else {
            world.agents[me].control.fire = None;
            return Ok(());
        };
        let spec = world.rules.armory.get(weapon);
        if !spec.in_range(distance) {
            world.agents[me].control.fire = None;
            return Ok(());
        }
        let Ok(state) = encode(&observation_for(world, me, target, spec.instant_hit)) else {
            return Ok(());
        };

        let held = self
            .pending
            .filter(|p| !self.fired && self.damage == 0.0 && p.weapon == weapon && p.target == target);
        let (category, chosen) = match held {
            Some(p) => (p.category, p.action),
            None => {
                let category = spec.category;
                let table = &mut tables[category];
                let (chosen, exploratory) = match self.mode {
                    ShooterMode::Learning => {
                        let eps = cfg.schedule().epsilon_for_lives(self.deaths);
                        let c = table.select_action(state, eps, rng);
                        (c.action, c.exploratory)
                    }
                    ShooterMode::Greedy => (table.greedy_action(state, rng), false),
                    ShooterMode::Random => (QTable::random_action(rng), true),
                };
                self.stats.decisions += 1;
                self.stats.exploratory += exploratory as u64;
                self.close_interval(Some((category, state, chosen)), tables, cfg)?;
                self.pending = Some(Pending {
                    category,
                    state,
                    action: chosen,
                    weapon,
                    target,
                    exploratory,
                });
                (category, chosen)
            }
        };

        let act = action(category, chosen);
        let aim = match resolve_aim(&act, agent.position, opponent.position, spec) {
            AimTarget::Fixed(p) => AimCommand::Fixed(p),
            AimTarget::LockedOn { height } => AimCommand::LockedOn { target, height },
        };
        let bearing = heading_deg([opponent.position.x - agent.position.x, opponent.position.y - agent.position.y]);
        let agent = &mut world.agents[me];
        agent.control.face_yaw = Some(bearing);
        agent.control.fire = Some(FireCommand {
            weapon,
            aim,
            yaw_error: 0.0,
        });
        Ok(())
    }

    /// Finish the open interval, learning from it when it contained a shot or damage.
    fn close_interval(
        &mut self,
        next: Option<(WeaponCategory, StateId, usize)>,
        tables: &mut TableSet,
        cfg: &LearnerConfig,
    ) -> Result<(), RlError> {
        let pending = self.pending.take();
        let (fired, damage) = (std::mem::take(&mut self.fired), std::mem::take(&mut self.damage));
        let Some(p) = pending else { return Ok(()) };
        if !fired && damage == 0.0 {
            return Ok(());
        }
        let reward = reward_for(damage).expect("damage is finite and non-negative");
        self.stats.reward += reward;
        if self.mode == ShooterMode::Learning {
            let delta = tables.sarsa_update((p.category, p.state, p.action), reward, next, cfg)?;
            self.stats.updates += 1;
            self.last_step = Some(StepDiagnostics {
                delta,
                reward,
                epsilon_used: cfg.schedule().epsilon_for_lives(self.deaths),
                was_exploratory: p.exploratory,
            });
        }
        Ok(())
    }

    /// Feed one tick's events. Returns the finished life's statistics when the bot died.
    pub fn observe<R: Rng + ?Sized>(
        &mut self,
        world: &World,
        events: &[super::SimEvent],
        tables: &mut TableSet,
        cfg: &LearnerConfig,
        rng: &mut R,
    ) -> Result<Option<ShooterStats>, RlError> {
        let me = self.agent;
        let mut ended = None;
        for e in events {
            match e.kind {
                EventKind::ShotFired { shooter, .. } if shooter == me => self.fired = true,
                EventKind::Damage {
                    attacker, victim, amount, ..
                } => {
                    if attacker == me && victim != me {
                        self.damage += amount;
                    }
                    if victim == me && attacker != me && rng.gen_bool(world.rules.physics.rl_dodge_chance) {
                        self.dodge = true;
                    }
                }
                EventKind::ShotResolved { shooter, shot, hit, .. } if shooter == me && shot >= self.first_shot_of_life => {
                    if hit {
                        self.stats.hits += 1;
                    } else {
                        self.stats.misses += 1;
                    }
                }
                EventKind::Kill { victim, .. } | EventKind::Suicide { victim, .. } if victim == me => {
                    self.close_interval(None, tables, cfg)?;
                    self.deaths += 1;
                    self.dodge = false;
                    ended = Some(std::mem::take(&mut self.stats));
                }
                EventKind::Spawn { agent } if agent == me => self.begin_life(world, tables),
                _ => {}
            }
        }
        Ok(ended)
    }

    fn begin_life(&mut self, world: &World, tables: &mut TableSet) {
        tables.begin_life();
        self.pending = None;
        self.fired = false;
        self.damage = 0.0;
        self.dodge = false;
        self.stats = ShooterStats::default();
        self.first_shot_of_life = world.next_shot_id();
    }

    /// Game over: the open interval is dropped without learning and the life's
    /// statistics so far are returned.
    pub fn end_game(&mut self, tables: &mut TableSet) -> ShooterStats {
        tables.begin_life();
        self.pending = None;
        self.fired = false;
        self.damage = 0.0;
        self.dodge = false;
        std::mem::take(&mut self.stats)
    }
}

/// What the learning bot perceives about `target`.
pub fn observation_for(world: &World, me: AgentId, target: AgentId, weapon_instant_hit: bool) -> CombatObservation {
    let (a, t) = (&world.agents[me], &world.agents[target]);
    let los = [t.position.x - a.position.x, t.position.y - a.position.y];
    CombatObservation {
        distance: los[0].hypot(los[1]),
        rel_velocity: [t.velocity[0] - a.velocity[0], t.velocity[1] - a.velocity[1]],
        line_of_sight: los,
        opponent_jumping: t.is_jumping(),
        facing_angle: normalize_degrees(heading_deg([-los[0], -los[1]]) - t.yaw),
        weapon_instant_hit,
    }
}

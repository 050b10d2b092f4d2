//! Fixed-timestep combat arena.
//!
//! [`World::tick`] is the only mutation entry point. Controllers (scripted opponents and
//! the learning shooter) write [`Control`]s into agents between ticks; the tick applies
//! them and reports what happened as [`SimEvent`]s in canonical order: pickups, shots,
//! damage, shot resolutions, deaths, spawns.

mod agent;
mod arena;
mod events;
mod nav;
mod scripted;
mod shooter;

pub use agent::{
    AgentId, AgentState, AimCommand, BotMemory, Control, Controller, DamageSource, FireCommand, JumpArc, Movement,
    NavState, OpponentProfile,
};
pub use arena::{Arena, ArenaError, MapConfig, Pickup, PickupKind, PickupSpec};
pub use events::{attribute_death, DeathCause, EventKind, SimEvent, SuicideCause};
pub use nav::navigate;
pub use scripted::{scripted_policy, BotDecision};
pub use shooter::{observation_for, RlShooter, ShooterMode, ShooterStats};

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encoder::normalize_degrees;
use crate::geometry::{heading_deg, ray_cylinder, Vec3};
use crate::weapons::{Armory, Inventory, PriorityTables, WeaponId, ASSAULT_RIFLE, CYLINDER_HEIGHT, CYLINDER_RADIUS};

/// Physics and controller constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsConfig {
    pub tick_hz: f64,
    /// Physics ticks between learning decisions.
    pub decision_every: u32,
    /// Physics ticks between scripted controller and navigation updates.
    pub scripted_every: u32,
    pub base_speed: f64,
    pub jump_duration: f64,
    pub jump_height: f64,
    pub respawn_delay: f64,
    pub eye_height: f64,
    pub max_health: f64,
    /// Shots are only released when facing within this many degrees of the aim point.
    pub fire_cone_deg: f64,
    pub hitscan_range: f64,
    pub projectile_lifetime: f64,
    /// Half-angle of the learning bot's view cone (degrees).
    pub rl_view_half_angle: f64,
    pub rl_turn_rate: f64,
    /// Uniform yaw/pitch noise on every shot of the learning bot (degrees).
    pub rl_aim_jitter_deg: f64,
    /// Chance that the learning bot dodge-jumps after taking damage.
    pub rl_dodge_chance: f64,
    /// Locked-on aim follows where the target was this many seconds ago.
    pub lock_on_lag_s: f64,
    /// Seconds after being hit during which a bot turns towards its attacker.
    pub alert_s: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        PhysicsConfig {
            tick_hz: 30.0,
            decision_every: 6,
            scripted_every: 3,
            base_speed: 440.0,
            jump_duration: 0.7,
            jump_height: 60.0,
            respawn_delay: 2.0,
            eye_height: 32.0,
            max_health: 100.0,
            fire_cone_deg: 20.0,
            hitscan_range: 10_000.0,
            projectile_lifetime: 4.0,
            rl_view_half_angle: 90.0,
            rl_turn_rate: 720.0,
            rl_aim_jitter_deg: 0.5,
            rl_dodge_chance: 1.0,
            lock_on_lag_s: 0.15,
            alert_s: 2.0,
        }
    }
}

impl PhysicsConfig {
    pub fn dt(&self) -> f64 {
        1.0 / self.tick_hz
    }

    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("tick_hz", self.tick_hz),
            ("base_speed", self.base_speed),
            ("jump_duration", self.jump_duration),
            ("max_health", self.max_health),
            ("hitscan_range", self.hitscan_range),
            ("projectile_lifetime", self.projectile_lifetime),
            ("rl_view_half_angle", self.rl_view_half_angle),
            ("rl_turn_rate", self.rl_turn_rate),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(format!("physics.{name} = {v} must be positive"));
        }
        let non_negative = [
            ("jump_height", self.jump_height),
            ("respawn_delay", self.respawn_delay),
            ("eye_height", self.eye_height),
            ("fire_cone_deg", self.fire_cone_deg),
            ("rl_aim_jitter_deg", self.rl_aim_jitter_deg),
            ("lock_on_lag_s", self.lock_on_lag_s),
            ("alert_s", self.alert_s),
        ];
        if let Some((name, v)) = non_negative.iter().find(|(_, v)| !(*v >= 0.0 && v.is_finite())) {
            return Err(format!("physics.{name} = {v} must be non-negative"));
        }
        if self.decision_every == 0 || self.scripted_every == 0 {
            return Err("physics.decision_every and physics.scripted_every must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.rl_dodge_chance) {
            return Err(format!("physics.rl_dodge_chance = {} is outside [0, 1]", self.rl_dodge_chance));
        }
        Ok(())
    }
}

/// Immutable rules shared by every world of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Rules {
    pub arena: Arena,
    pub armory: Armory,
    pub priorities: PriorityTables,
    pub physics: PhysicsConfig,
}

impl Default for Rules {
    fn default() -> Self {
        let armory = Armory::default();
        Rules {
            arena: Arena::new(&MapConfig::default(), &armory).expect("default map is valid"),
            armory,
            priorities: PriorityTables::default(),
            physics: PhysicsConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projectile {
    pub shot: u64,
    pub owner: AgentId,
    pub weapon: WeaponId,
    pub position: Vec3,
    pub velocity: Vec3,
    pub age: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct PendingShot {
    id: u64,
    shooter: AgentId,
    weapon: WeaponId,
    pellets_left: u32,
    hit: bool,
}

#[derive(Debug, Clone, Copy)]
struct PendingDamage {
    attacker: AgentId,
    victim: AgentId,
    amount: f64,
    weapon: WeaponId,
    shot: u64,
    splash: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub tick: u64,
    pub rules: Arc<Rules>,
    pub agents: Vec<AgentState>,
    pub projectiles: Vec<Projectile>,
    /// Seconds until each pickup is available again; 0 when available.
    pub pickup_timers: Vec<f64>,
    shots: Vec<PendingShot>,
    next_shot: u64,
    last_hit_tick: Vec<Option<u64>>,
}

impl World {
    pub fn new(rules: Arc<Rules>) -> Self {
        let pickups = rules.arena.pickups.len();
        World {
            tick: 0,
            rules,
            agents: Vec::new(),
            projectiles: Vec::new(),
            pickup_timers: vec![0.0; pickups],
            shots: Vec::new(),
            next_shot: 0,
            last_hit_tick: Vec::new(),
        }
    }

    /// Add an agent that spawns on the next tick.
    pub fn add_agent(&mut self, controller: Controller) -> AgentId {
        let id = self.agents.len();
        let physics = &self.rules.physics;
        let turn_rate = match &controller {
            Controller::Rl => physics.rl_turn_rate,
            Controller::Scripted(p) => p.turn_rate,
        };
        self.agents.push(AgentState {
            id,
            position: Vec3::ZERO,
            velocity: [0.0, 0.0],
            yaw: 0.0,
            health: 0.0,
            jump: None,
            inventory: Inventory::new(&self.rules.armory),
            max_speed: physics.base_speed * controller.speed_fraction(),
            controller,
            alive: false,
            respawn_timer: 0.0,
            control: Control::default(),
            cooldown: 0.0,
            last_damage: None,
            turn_rate,
            nav: NavState::default(),
            memory: BotMemory::default(),
            life: 0,
        });
        self.last_hit_tick.push(None);
        id
    }

    pub fn dt(&self) -> f64 {
        self.rules.physics.dt()
    }

    /// Id the next fired shot will get.
    pub fn next_shot_id(&self) -> u64 {
        self.next_shot
    }

    /// Tick on which `agent` last took damage.
    pub fn last_hit_tick(&self, agent: AgentId) -> Option<u64> {
        self.last_hit_tick[agent]
    }

    /// Whether `observer` has an unobstructed view of `target` within `half_angle` of its facing.
    pub fn can_see(&self, observer: AgentId, target: AgentId, half_angle: f64) -> bool {
        let (o, t) = (&self.agents[observer], &self.agents[target]);
        if !o.alive || !t.alive || observer == target {
            return false;
        }
        let d = [t.position.x - o.position.x, t.position.y - o.position.y];
        if d[0] == 0.0 && d[1] == 0.0 {
            return true;
        }
        let off = normalize_degrees(heading_deg(d) - o.yaw).abs();
        off <= half_angle && self.rules.arena.line_of_sight(o.planar(), t.planar())
    }

    pub fn has_line_of_sight(&self, a: AgentId, b: AgentId) -> bool {
        self.rules.arena.line_of_sight(self.agents[a].planar(), self.agents[b].planar())
    }

    /// Advance one fixed step.
    ///
    /// # Panics
    /// If `dt` differs from the configured physics step.
    pub fn tick<R: Rng + ?Sized>(&mut self, dt: f64, rng: &mut R) -> Vec<SimEvent> {
        let step = self.dt();
        assert!((dt - step).abs() <= 1e-12 * step, "tick dt {dt} differs from the physics step {step}");
        let tick = self.tick;
        let mut pickups = Vec::new();
        let mut fired = Vec::new();
        let mut deaths: Vec<(AgentId, DeathCause)> = Vec::new();
        let mut damage: Vec<PendingDamage> = Vec::new();

        self.advance_timers(dt);
        self.move_agents(dt, &mut deaths);
        self.collect_pickups(&mut pickups);
        self.turn_agents(dt);
        self.fire_weapons(rng, &mut fired, &mut damage);
        self.advance_projectiles(dt, &mut damage);

        let mut events: Vec<SimEvent> = pickups.into_iter().chain(fired).map(|kind| SimEvent { tick, kind }).collect();
        self.apply_damage(&damage, &mut deaths, &mut events);
        self.resolve_shots(&mut events);
        for (victim, cause) in deaths {
            let kind = attribute_death(victim, self.agents[victim].last_damage, cause);
            self.kill(victim);
            events.push(SimEvent { tick, kind });
        }
        self.respawn(rng, &mut events);
        self.tick += 1;
        events
    }

    fn advance_timers(&mut self, dt: f64) {
        for t in &mut self.pickup_timers {
            *t = (*t - dt).max(0.0);
        }
        for a in &mut self.agents {
            a.cooldown = (a.cooldown - dt).max(0.0);
            if !a.alive {
                a.respawn_timer -= dt;
            }
        }
    }

    fn move_agents(&mut self, dt: f64, deaths: &mut Vec<(AgentId, DeathCause)>) {
        let physics = &self.rules.physics;
        let arena = &self.rules.arena;
        for a in self.agents.iter_mut().filter(|a| a.alive) {
            let mut planar_v = match a.jump {
                Some(j) => j.velocity,
                None => match a.control.jump.take() {
                    Some(v) => {
                        let v = clip(v, a.max_speed);
                        a.jump = Some(JumpArc { elapsed: 0.0, velocity: v });
                        v
                    }
                    None => match a.control.movement {
                        Movement::Stop => [0.0, 0.0],
                        Movement::Velocity(v) => clip(v, a.max_speed),
                        Movement::Toward(p) => {
                            let d = [p[0] - a.position.x, p[1] - a.position.y];
                            let len = d[0].hypot(d[1]);
                            if len < 1e-9 {
                                [0.0, 0.0]
                            } else {
                                let speed = a.max_speed.min(len / dt);
                                [d[0] / len * speed, d[1] / len * speed]
                            }
                        }
                    },
                },
            };

            let from = a.planar();
            let target = [from[0] + planar_v[0] * dt, from[1] + planar_v[1] * dt];
            let to = if free_move(arena, from, target) {
                target
            } else if free_move(arena, from, [target[0], from[1]]) {
                [target[0], from[1]]
            } else if free_move(arena, from, [from[0], target[1]]) {
                [from[0], target[1]]
            } else {
                from
            };
            planar_v = [(to[0] - from[0]) / dt, (to[1] - from[1]) / dt];
            a.position.x = to[0];
            a.position.y = to[1];
            a.velocity = planar_v;

            if let Some(j) = &mut a.jump {
                j.velocity = planar_v;
                j.elapsed += dt;
                let (t, span) = (j.elapsed, physics.jump_duration);
                if t >= span {
                    a.jump = None;
                    a.position.z = 0.0;
                } else {
                    a.position.z = 4.0 * physics.jump_height * t * (span - t) / (span * span);
                }
            }
            if a.jump.is_none() && arena.in_pit(a.planar()) {
                deaths.push((a.id, DeathCause::Pit));
                a.alive = false;
            }
        }
    }

    fn collect_pickups(&mut self, out: &mut Vec<EventKind>) {
        let rules = Arc::clone(&self.rules);
        let arena = &rules.arena;
        for a in self.agents.iter_mut().filter(|a| a.alive && a.jump.is_none()) {
            for (i, p) in arena.pickups.iter().enumerate() {
                if self.pickup_timers[i] > 0.0 {
                    continue;
                }
                if (a.position.x - p.position[0]).hypot(a.position.y - p.position[1]) > arena.pickup_radius {
                    continue;
                }
                let useful = match p.kind {
                    PickupKind::Weapon => true,
                    PickupKind::Ammo => p.grants.iter().any(|&w| a.inventory.holds(w)),
                };
                if !useful {
                    continue;
                }
                for &w in &p.grants {
                    if p.kind == PickupKind::Weapon || a.inventory.holds(w) {
                        a.inventory.grant(w, rules.armory.get(w).ammo, &rules.armory);
                    }
                }
                self.pickup_timers[i] = arena.pickup_respawn_s;
                out.push(EventKind::Pickup {
                    agent: a.id,
                    item: i,
                    kind: p.kind,
                });
            }
        }
    }

    fn turn_agents(&mut self, dt: f64) {
        for a in self.agents.iter_mut().filter(|a| a.alive) {
            let desired = match a.control.face_yaw {
                Some(y) => Some(y),
                None if a.velocity[0].hypot(a.velocity[1]) > 1.0 => Some(heading_deg(a.velocity)),
                None => None,
            };
            if let Some(y) = desired {
                let diff = normalize_degrees(y - a.yaw);
                let max = a.turn_rate * dt;
                a.yaw = normalize_degrees(a.yaw + diff.clamp(-max, max));
            }
        }
    }

    fn aim_point(&self, cmd: &FireCommand) -> Option<Vec3> {
        match cmd.aim {
            AimCommand::Fixed(p) => Some(p),
            AimCommand::LockedOn { target, height } => {
                let t = self.agents.get(target)?;
                let lag = self.rules.physics.lock_on_lag_s;
                t.alive.then(|| {
                    Vec3::new(
                        t.position.x - t.velocity[0] * lag,
                        t.position.y - t.velocity[1] * lag,
                        t.position.z + height,
                    )
                })
            }
        }
    }

    fn fire_weapons<R: Rng + ?Sized>(&mut self, rng: &mut R, fired: &mut Vec<EventKind>, damage: &mut Vec<PendingDamage>) {
        let rules = Arc::clone(&self.rules);
        for id in 0..self.agents.len() {
            let a = &self.agents[id];
            let Some(cmd) = a.control.fire else { continue };
            if !a.alive || a.cooldown > 0.0 || !a.inventory.has_ammo(cmd.weapon, &rules.armory) {
                continue;
            }
            let Some(aim) = self.aim_point(&cmd) else { continue };
            let muzzle = a.position + Vec3::new(0.0, 0.0, rules.physics.eye_height);
            let to_aim = aim - muzzle;
            let planar_len = to_aim.x.hypot(to_aim.y);
            let bearing = if planar_len > 1e-9 { heading_deg([to_aim.x, to_aim.y]) } else { a.yaw };
            if normalize_degrees(bearing - a.yaw).abs() > rules.physics.fire_cone_deg {
                continue;
            }
            let spec = rules.armory.get(cmd.weapon);
            let a = &mut self.agents[id];
            a.inventory.consume(cmd.weapon, &rules.armory);
            a.cooldown = spec.fire_interval;
            let jitter = if a.is_rl() { rules.physics.rl_aim_jitter_deg } else { 0.0 };

            let shot = self.next_shot;
            self.next_shot += 1;
            fired.push(EventKind::ShotFired {
                shooter: id,
                shot,
                weapon: cmd.weapon,
            });
            self.shots.push(PendingShot {
                id: shot,
                shooter: id,
                weapon: cmd.weapon,
                pellets_left: spec.pellets,
                hit: false,
            });

            let pitch = to_aim.z.atan2(planar_len).to_degrees();
            for _ in 0..spec.pellets {
                let mut yaw = bearing + cmd.yaw_error;
                let mut pitch = pitch;
                if jitter > 0.0 {
                    yaw += rng.gen_range(-jitter..=jitter);
                    pitch += rng.gen_range(-jitter..=jitter);
                }
                if spec.spread_deg > 0.0 {
                    yaw += rng.gen_range(-spec.spread_deg..=spec.spread_deg);
                    pitch += rng.gen_range(-spec.spread_deg..=spec.spread_deg);
                }
                let dir = direction(yaw, pitch);
                if spec.instant_hit {
                    let range = if spec.range > 0.0 { spec.range } else { rules.physics.hitscan_range };
                    if let Some((victim, _)) = self.hitscan(id, muzzle, dir, range) {
                        damage.push(PendingDamage {
                            attacker: id,
                            victim,
                            amount: spec.damage_per_hit,
                            weapon: cmd.weapon,
                            shot,
                            splash: false,
                        });
                    }
                    self.pellet_done(shot);
                } else {
                    self.projectiles.push(Projectile {
                        shot,
                        owner: id,
                        weapon: cmd.weapon,
                        position: muzzle,
                        velocity: dir * spec.projectile_speed,
                        age: 0.0,
                    });
                }
            }
        }
    }

    /// Nearest agent hit by a ray, respecting walls and the floor.
    pub fn hitscan(&self, shooter: AgentId, origin: Vec3, dir: Vec3, range: f64) -> Option<(AgentId, f64)> {
        let t_block = self.blocking_param(origin, dir, range);
        self.agents
            .iter()
            .filter(|t| t.alive && t.id != shooter)
            .filter_map(|t| ray_cylinder(origin, dir, &t.cylinder(), 0.0, t_block).map(|hit| (t.id, hit)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Ray parameter at which walls, the floor or the arena edge stop a ray, capped at `t_max`.
    fn blocking_param(&self, origin: Vec3, dir: Vec3, t_max: f64) -> f64 {
        let arena = &self.rules.arena;
        let p = origin.planar();
        let end = origin + dir * t_max;
        let q = end.planar();
        let mut t = t_max;
        for w in &arena.walls {
            if let Some(s) = w.intersect_param(p, q) {
                t = t.min(s * t_max);
            }
        }
        if dir.z < 0.0 {
            t = t.min(-origin.z / dir.z);
        }
        for (o, d) in [(origin.x, dir.x), (origin.y, dir.y)] {
            if d < 0.0 {
                t = t.min(-o / d);
            } else if d > 0.0 {
                t = t.min((arena.size - o) / d);
            }
        }
        t.max(0.0)
    }

    fn pellet_done(&mut self, shot: u64) {
        if let Some(s) = self.shots.iter_mut().find(|s| s.id == shot) {
            s.pellets_left = s.pellets_left.saturating_sub(1);
        }
    }

    fn advance_projectiles(&mut self, dt: f64, damage: &mut Vec<PendingDamage>) {
        let rules = Arc::clone(&self.rules);
        let projectiles = std::mem::take(&mut self.projectiles);
        let mut keep = Vec::with_capacity(projectiles.len());
        for mut p in projectiles {
            let step = p.velocity * dt;
            let step_len = step.length();
            let dir = step * (1.0 / step_len);
            let t_block = self.blocking_param(p.position, dir, step_len);
            let direct = self
                .agents
                .iter()
                .filter(|t| t.alive && t.id != p.owner)
                .filter_map(|t| ray_cylinder(p.position, dir, &t.cylinder(), 0.0, t_block).map(|hit| (t.id, hit)))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            let spec = rules.armory.get(p.weapon);
            let detonation = match direct {
                Some((victim, t)) => Some((p.position + dir * t, Some(victim))),
                None if t_block < step_len => Some((p.position + dir * t_block, None)),
                None => None,
            };
            match detonation {
                Some((point, victim)) => {
                    if let Some(v) = victim {
                        damage.push(PendingDamage {
                            attacker: p.owner,
                            victim: v,
                            amount: spec.damage_per_hit,
                            weapon: p.weapon,
                            shot: p.shot,
                            splash: false,
                        });
                    }
                    if spec.splash_radius > 0.0 {
                        for t in self.agents.iter().filter(|t| t.alive && Some(t.id) != victim) {
                            if t.id == p.owner && !spec.self_damage {
                                continue;
                            }
                            let d = distance_to_cylinder(point, t.position);
                            if d < spec.splash_radius {
                                damage.push(PendingDamage {
                                    attacker: p.owner,
                                    victim: t.id,
                                    amount: spec.damage_per_hit * (1.0 - d / spec.splash_radius),
                                    weapon: p.weapon,
                                    shot: p.shot,
                                    splash: true,
                                });
                            }
                        }
                    }
                    self.pellet_done(p.shot);
                }
                None => {
                    p.position = p.position + step;
                    p.age += dt;
                    if p.age >= rules.physics.projectile_lifetime {
                        self.pellet_done(p.shot);
                    } else {
                        keep.push(p);
                    }
                }
            }
        }
        self.projectiles = keep;
    }

    fn apply_damage(&mut self, damage: &[PendingDamage], deaths: &mut Vec<(AgentId, DeathCause)>, events: &mut Vec<SimEvent>) {
        for d in damage {
            let victim = &mut self.agents[d.victim];
            if !victim.alive {
                continue;
            }
            let applied = d.amount.min(victim.health);
            if applied <= 0.0 {
                continue;
            }
            victim.health -= applied;
            victim.last_damage = Some(DamageSource {
                attacker: d.attacker,
                splash: d.splash,
            });
            self.last_hit_tick[d.victim] = Some(self.tick);
            events.push(SimEvent {
                tick: self.tick,
                kind: EventKind::Damage {
                    attacker: d.attacker,
                    victim: d.victim,
                    amount: applied,
                    weapon: d.weapon,
                    shot: d.shot,
                },
            });
            if d.attacker != d.victim {
                if let Some(s) = self.shots.iter_mut().find(|s| s.id == d.shot) {
                    s.hit = true;
                }
            }
            let victim = &mut self.agents[d.victim];
            if victim.health <= 0.0 {
                victim.health = 0.0;
                victim.alive = false;
                deaths.push((d.victim, DeathCause::Damage));
            }
        }
    }

    fn resolve_shots(&mut self, events: &mut Vec<SimEvent>) {
        let tick = self.tick;
        self.shots.retain(|s| {
            if s.pellets_left > 0 {
                return true;
            }
            events.push(SimEvent {
                tick,
                kind: EventKind::ShotResolved {
                    shooter: s.shooter,
                    shot: s.id,
                    weapon: s.weapon,
                    hit: s.hit,
                },
            });
            false
        });
    }

    fn kill(&mut self, victim: AgentId) {
        let delay = self.rules.physics.respawn_delay;
        let a = &mut self.agents[victim];
        a.alive = false;
        a.health = 0.0;
        a.jump = None;
        a.velocity = [0.0, 0.0];
        a.control = Control::default();
        a.respawn_timer = delay;
        a.life += 1;
    }

    fn respawn<R: Rng + ?Sized>(&mut self, rng: &mut R, events: &mut Vec<SimEvent>) {
        let rules = Arc::clone(&self.rules);
        for id in 0..self.agents.len() {
            if self.agents[id].alive || self.agents[id].respawn_timer > 0.0 {
                continue;
            }
            let spawn = self.pick_spawn(id, rng);
            let centre = rules.arena.size / 2.0;
            let armory = &rules.armory;
            let a = &mut self.agents[id];
            a.position = Vec3::new(spawn[0], spawn[1], 0.0);
            a.velocity = [0.0, 0.0];
            a.yaw = heading_deg([centre - spawn[0], centre - spawn[1]]);
            a.health = rules.physics.max_health;
            a.alive = true;
            a.jump = None;
            a.inventory = Inventory::spawn_loadout(armory);
            a.control = Control::default();
            a.cooldown = 0.0;
            a.last_damage = None;
            a.nav = NavState::default();
            a.memory = BotMemory::default();
            self.last_hit_tick[id] = None;
            events.push(SimEvent {
                tick: self.tick,
                kind: EventKind::Spawn { agent: id },
            });
        }
    }

    /// Random spawn point, weighted by squared distance to the nearest living agent.
    fn pick_spawn<R: Rng + ?Sized>(&self, id: AgentId, rng: &mut R) -> [f64; 2] {
        let spawns = &self.rules.arena.spawns;
        let weights: Vec<f64> = spawns
            .iter()
            .map(|s| {
                self.agents
                    .iter()
                    .filter(|o| o.alive && o.id != id)
                    .map(|o| (o.position.x - s[0]).hypot(o.position.y - s[1]))
                    .fold(f64::INFINITY, f64::min)
            })
            .map(|d| if d.is_infinite() { 1.0 } else { d * d })
            .collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return spawns[rng.gen_range(0..spawns.len())];
        }
        let mut pick = rng.gen::<f64>() * total;
        for (s, w) in spawns.iter().zip(&weights) {
            if pick < *w {
                return *s;
            }
            pick -= w;
        }
        *spawns.last().expect("arena has spawns")
    }

    /// Current loadout weapon for a freshly spawned agent.
    pub fn default_weapon(&self) -> WeaponId {
        self.rules.armory.index_of(ASSAULT_RIFLE).expect("armory validated")
    }
}

fn clip(v: [f64; 2], max: f64) -> [f64; 2] {
    let len = v[0].hypot(v[1]);
    if len > max && len > 0.0 {
        [v[0] / len * max, v[1] / len * max]
    } else {
        v
    }
}

fn free_move(arena: &Arena, from: [f64; 2], to: [f64; 2]) -> bool {
    let r = CYLINDER_RADIUS;
    to[0] >= r
        && to[1] >= r
        && to[0] <= arena.size - r
        && to[1] <= arena.size - r
        && arena.walls.iter().all(|w| w.distance_to(to) >= r && !w.intersects(from, to))
}

/// Unit vector for a heading and elevation in degrees.
pub fn direction(yaw_deg: f64, pitch_deg: f64) -> Vec3 {
    let (yaw, pitch) = (yaw_deg.to_radians(), pitch_deg.to_radians());
    Vec3::new(yaw.cos() * pitch.cos(), yaw.sin() * pitch.cos(), pitch.sin())
}

/// Distance from a point to an upright collision cylinder standing at `base`.
fn distance_to_cylinder(p: Vec3, base: Vec3) -> f64 {
    let radial = (p.planar_distance(base) - CYLINDER_RADIUS).max(0.0);
    let vertical = if p.z < base.z {
        base.z - p.z
    } else if p.z > base.z + CYLINDER_HEIGHT {
        p.z - base.z - CYLINDER_HEIGHT
    } else {
        0.0
    };
    radial.hypot(vertical)
}

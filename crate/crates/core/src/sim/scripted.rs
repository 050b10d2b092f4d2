use rand::Rng;

use super::agent::{AgentId, AimCommand, BotMemory, Control, Controller, FireCommand, Movement, NavState};
use super::nav::navigate;
use super::World;
use crate::encoder::{discretize_distance, DistanceBand};
use crate::geometry::heading_deg;
use crate::weapons::{select_weapon, MID_HEIGHT};

/// Everything a controller update writes back into its agent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BotDecision {
    pub control: Control,
    pub nav: NavState,
    pub memory: BotMemory,
}

/// Distance the strafe look-ahead checks for pits and walls.
const STRAFE_LOOKAHEAD_S: f64 = 0.4;
/// Preferred engagement distance of opponents that close in.
const CLOSE_IN_RANGE: f64 = 700.0;

/// Scripted opponent update for `me`, run every few physics ticks.
///
/// Acquires the nearest visible enemy inside its view cone (or whoever just hit it),
/// turns to face it and fires with a fresh uniform aim error per decision. Higher
/// levels strafe, close distance and jump away from incoming projectiles; dodge jumps
/// do not check where they land.
pub fn scripted_policy<R: Rng + ?Sized>(world: &World, me: AgentId, rng: &mut R) -> BotDecision {
    let agent = &world.agents[me];
    let Controller::Scripted(profile) = &agent.controller else {
        panic!("agent {me} is not scripted");
    };
    let physics = &world.rules.physics;
    let step = physics.dt() * physics.scripted_every as f64;
    let mut memory = agent.memory;
    memory.strafe_timer -= step;

    let alert = world.last_hit_tick(me).and_then(|t| {
        let recent = (world.tick - t) as f64 * physics.dt() <= physics.alert_s;
        let attacker = agent.last_damage?.attacker;
        (recent && attacker != me && world.agents[attacker].alive).then_some(attacker)
    });
    memory.alerted_by = alert;

    let retained = memory
        .target
        .filter(|&t| world.agents[t].alive && world.has_line_of_sight(me, t));
    let acquired = || {
        world
            .agents
            .iter()
            .filter(|o| world.can_see(me, o.id, profile.fov))
            .min_by(|a, b| {
                let da = a.position.planar_distance(agent.position);
                let db = b.position.planar_distance(agent.position);
                da.total_cmp(&db)
            })
            .map(|o| o.id)
    };
    memory.target = retained.or_else(acquired);

    let (nav_move, nav) = navigate(world, me, rng);
    let mut control = Control {
        movement: nav_move,
        ..Control::default()
    };

    if let Some(target) = memory.target {
        let t = &world.agents[target];
        let to = [t.position.x - agent.position.x, t.position.y - agent.position.y];
        let dist = to[0].hypot(to[1]);
        control.face_yaw = Some(heading_deg(to));
        let band = discretize_distance(dist).unwrap_or(DistanceBand::Far);
        let usable = select_weapon(&agent.inventory, band, &world.rules.priorities, &world.rules.armory)
            .ok()
            .filter(|&w| world.rules.armory.get(w).in_range(dist));
        if let Some(weapon) = usable {
            control.fire = Some(FireCommand {
                weapon,
                aim: AimCommand::LockedOn {
                    target,
                    height: MID_HEIGHT,
                },
                yaw_error: rng.gen_range(-profile.max_aim_error..=profile.max_aim_error),
            });
        }
        control.movement = if profile.strafes {
            if memory.strafe_timer <= 0.0 || memory.strafe_sign == 0.0 {
                memory.strafe_sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                memory.strafe_timer = rng.gen_range(profile.strafe_switch_s / 2.0..=profile.strafe_switch_s);
            }
            let unit = if dist > 0.0 { [to[0] / dist, to[1] / dist] } else { [1.0, 0.0] };
            let side = [-unit[1], unit[0]];
            let mut v = strafe_velocity(unit, side, memory.strafe_sign, dist, profile.closes_distance);
            if !clear_ahead(world, me, v) {
                memory.strafe_sign = -memory.strafe_sign;
                v = strafe_velocity(unit, side, memory.strafe_sign, dist, profile.closes_distance);
                if !clear_ahead(world, me, v) {
                    v = [0.0, 0.0];
                }
            }
            Movement::Velocity([v[0] * agent.max_speed, v[1] * agent.max_speed])
        } else {
            Movement::Stop
        };
    } else if let Some(attacker) = alert {
        let a = &world.agents[attacker];
        control.face_yaw = Some(heading_deg([a.position.x - agent.position.x, a.position.y - agent.position.y]));
    }

    if profile.dodges && !agent.is_jumping() {
        // sidestep a projectile about to pass close by, or the line of fire that just hit
        let just_hit = world
            .last_hit_tick(me)
            .is_some_and(|t| world.tick - t < physics.scripted_every as u64);
        let incoming = incoming_projectile(world, me, profile.dodge_radius).or_else(|| {
            let attacker = agent.last_damage.filter(|_| just_hit)?.attacker;
            let a = &world.agents[attacker];
            let d = [agent.position.x - a.position.x, agent.position.y - a.position.y];
            let len = d[0].hypot(d[1]);
            (attacker != me && len > 0.0).then(|| [d[0] / len, d[1] / len])
        });
        if let Some(away) = incoming {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            control.jump = Some([-away[1] * sign * agent.max_speed, away[0] * sign * agent.max_speed]);
        }
    }

    BotDecision { control, nav, memory }
}

fn strafe_velocity(unit: [f64; 2], side: [f64; 2], sign: f64, dist: f64, closes: bool) -> [f64; 2] {
    let advance = if closes && dist > CLOSE_IN_RANGE { 0.8 } else { 0.0 };
    let v = [side[0] * sign + unit[0] * advance, side[1] * sign + unit[1] * advance];
    let len = v[0].hypot(v[1]);
    [v[0] / len, v[1] / len]
}

/// Whether walking along unit direction `v` stays on standable floor for a moment.
fn clear_ahead(world: &World, me: AgentId, v: [f64; 2]) -> bool {
    let agent = &world.agents[me];
    let reach = agent.max_speed * STRAFE_LOOKAHEAD_S;
    let p = agent.planar();
    let q = [p[0] + v[0] * reach, p[1] + v[1] * reach];
    let arena = &world.rules.arena;
    arena.is_standable(q) && arena.line_of_sight(p, q) && !arena.pits.iter().any(|pit| pit.intersects_segment(p, q))
}

/// Planar unit direction of an enemy projectile about to pass close by, if any.
fn incoming_projectile(world: &World, me: AgentId, radius: f64) -> Option<[f64; 2]> {
    let p = world.agents[me].position;
    world
        .projectiles
        .iter()
        .filter(|pr| pr.owner != me)
        .find_map(|pr| {
            let rel = [p.x - pr.position.x, p.y - pr.position.y];
            let v = [pr.velocity.x, pr.velocity.y];
            let speed = v[0].hypot(v[1]);
            let dist = rel[0].hypot(rel[1]);
            if speed == 0.0 || dist > radius {
                return None;
            }
            let u = [v[0] / speed, v[1] / speed];
            let along = rel[0] * u[0] + rel[1] * u[1];
            let miss = (rel[0] * u[1] - rel[1] * u[0]).abs();
            (along > 0.0 && miss < 150.0).then_some(u)
        })
}

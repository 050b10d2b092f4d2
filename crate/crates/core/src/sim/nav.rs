use rand::Rng;

use super::agent::{AgentId, Movement, NavState};
use super::arena::PickupKind;
use super::World;

/// Distance at which a waypoint counts as reached.
const ARRIVE_RADIUS: f64 = 30.0;

/// Waypoint-following step: wander between useful pickups and random nodes.
pub fn navigate<R: Rng + ?Sized>(world: &World, me: AgentId, rng: &mut R) -> (Movement, NavState) {
    let arena = &world.rules.arena;
    let agent = &world.agents[me];
    let p = agent.planar();
    let mut nav = agent.nav;

    // a visible waypoint behind a wall tip would pin the body in place, so keep radius clearance
    if !nav.next.is_some_and(|n| arena.passable(p, arena.nodes[n])) {
        nav.next = arena.nearest_reachable_node(p);
    }
    let Some(mut next) = nav.next else {
        return (Movement::Stop, NavState::default());
    };
    let goal = match nav.goal {
        Some(g) => g,
        None => choose_goal(world, me, rng),
    };
    let mut goal = goal;
    let q = arena.nodes[next];
    if (q[0] - p[0]).hypot(q[1] - p[1]) < ARRIVE_RADIUS {
        if next == goal {
            goal = choose_goal(world, me, rng);
        }
        next = arena.next_hop(next, goal);
    }
    nav.next = Some(next);
    nav.goal = Some(goal);
    (Movement::Toward(arena.nodes[next]), nav)
}

fn choose_goal<R: Rng + ?Sized>(world: &World, me: AgentId, rng: &mut R) -> usize {
    let arena = &world.rules.arena;
    let agent = &world.agents[me];
    let wanted: Vec<usize> = arena
        .pickups
        .iter()
        .enumerate()
        .filter(|(i, _)| world.pickup_timers[*i] <= 0.0)
        .filter(|(_, pk)| match pk.kind {
            PickupKind::Weapon => pk.grants.iter().any(|&w| !agent.inventory.holds(w)),
            PickupKind::Ammo => pk.grants.iter().any(|&w| agent.inventory.holds(w)),
        })
        .map(|(i, _)| arena.pickup_node(i))
        .collect();
    if !wanted.is_empty() && rng.gen_bool(0.6) {
        wanted[rng.gen_range(0..wanted.len())]
    } else {
        rng.gen_range(0..arena.nodes.len())
    }
}

//! Static arena geometry: walls, pits, spawn points, pickups and the waypoint graph.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Rect, Segment};
use crate::weapons::{Armory, CYLINDER_RADIUS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArenaError {
    #[error("arena size must be positive")]
    InvalidSize,
    #[error("spawn point {0:?} is outside the walkable area or inside a pit")]
    BadSpawn([f64; 2]),
    #[error("at least {0} spawn points are required")]
    TooFewSpawns(usize),
    #[error("pickup `{0}` names an unknown weapon")]
    UnknownPickupWeapon(String),
    #[error("pickup at {0:?} is inside a pit or outside the arena")]
    BadPickup([f64; 2]),
    #[error("waypoint graph is disconnected")]
    Disconnected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PickupKind {
    /// Grants the listed weapons with their stock ammunition.
    Weapon,
    /// Adds stock ammunition to the listed weapons if held.
    Ammo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PickupSpec {
    pub kind: PickupKind,
    pub position: [f64; 2],
    pub grants: Vec<String>,
}

/// Map layout as written in the run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub size: f64,
    /// Interior walls as `[x1, y1, x2, y2]`.
    pub walls: Vec<[f64; 4]>,
    /// Pits as `[xmin, ymin, xmax, ymax]`.
    pub pits: Vec<[f64; 4]>,
    pub spawns: Vec<[f64; 2]>,
    pub pickups: Vec<PickupSpec>,
    pub pickup_respawn_s: f64,
    pub pickup_radius: f64,
    /// Spacing of the navigation grid (UU).
    pub nav_spacing: f64,
}

impl Default for MapConfig {
    fn default() -> Self {
        let weapon = |x, y, grants: &[&str]| PickupSpec {
            kind: PickupKind::Weapon,
            position: [x, y],
            grants: grants.iter().map(|s| s.to_string()).collect(),
        };
        let ammo = |x, y, grants: &[&str]| PickupSpec {
            kind: PickupKind::Ammo,
            position: [x, y],
            grants: grants.iter().map(|s| s.to_string()).collect(),
        };
        MapConfig {
            size: 4000.0,
            walls: vec![[1300.0, 1000.0, 1300.0, 2200.0], [2700.0, 1800.0, 2700.0, 3000.0]],
            pits: vec![
                [1800.0, 1800.0, 2200.0, 2200.0],
                [500.0, 2900.0, 900.0, 3300.0],
                [3100.0, 700.0, 3500.0, 1100.0],
            ],
            spawns: vec![[400.0, 400.0], [3600.0, 3600.0], [400.0, 3600.0], [3600.0, 400.0]],
            pickups: vec![
                weapon(2000.0, 1400.0, &["shock_rifle"]),
                weapon(2000.0, 2600.0, &["flak_cannon", "flak_cannon_alt"]),
                weapon(1000.0, 2000.0, &["rocket_launcher"]),
                weapon(3000.0, 2000.0, &["link_gun"]),
                weapon(800.0, 800.0, &["mini_gun"]),
                weapon(3200.0, 3200.0, &["lightning_gun"]),
                ammo(1600.0, 600.0, &["assault_rifle"]),
                ammo(2400.0, 3400.0, &["shock_rifle"]),
                ammo(600.0, 2400.0, &["flak_cannon", "flak_cannon_alt"]),
                ammo(3400.0, 1600.0, &["rocket_launcher"]),
                ammo(2400.0, 600.0, &["link_gun"]),
                ammo(1600.0, 3400.0, &["mini_gun"]),
            ],
            pickup_respawn_s: 20.0,
            pickup_radius: 40.0,
            nav_spacing: 400.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pickup {
    pub kind: PickupKind,
    pub position: [f64; 2],
    pub grants: Vec<usize>,
    pub label: String,
}

/// Validated arena with a precomputed all-pairs waypoint route table.
#[derive(Debug, Clone, PartialEq)]
pub struct Arena {
    pub size: f64,
    pub walls: Vec<Segment>,
    pub pits: Vec<Rect>,
    pub spawns: Vec<[f64; 2]>,
    pub pickups: Vec<Pickup>,
    pub pickup_respawn_s: f64,
    pub pickup_radius: f64,
    pub nodes: Vec<[f64; 2]>,
    next_hop: Vec<Vec<Option<usize>>>,
}

/// Clearance kept between navigation edges and pits.
const PIT_CLEARANCE: f64 = 60.0;

impl Arena {
    pub fn new(cfg: &MapConfig, armory: &Armory) -> Result<Self, ArenaError> {
        if !(cfg.size > 0.0 && cfg.size.is_finite()) {
            return Err(ArenaError::InvalidSize);
        }
        let walls = cfg
            .walls
            .iter()
            .map(|w| Segment::new([w[0], w[1]], [w[2], w[3]]))
            .collect();
        let pits = cfg.pits.iter().map(|p| Rect::new([p[0], p[1]], [p[2], p[3]])).collect();
        let mut arena = Arena {
            size: cfg.size,
            walls,
            pits,
            spawns: cfg.spawns.clone(),
            pickups: Vec::new(),
            pickup_respawn_s: cfg.pickup_respawn_s,
            pickup_radius: cfg.pickup_radius,
            nodes: Vec::new(),
            next_hop: Vec::new(),
        };
        if arena.spawns.len() < 4 {
            return Err(ArenaError::TooFewSpawns(4));
        }
        for &s in &arena.spawns {
            if !arena.is_standable(s) {
                return Err(ArenaError::BadSpawn(s));
            }
        }
        for spec in &cfg.pickups {
            let grants = spec
                .grants
                .iter()
                .map(|g| armory.index_of(g).ok_or_else(|| ArenaError::UnknownPickupWeapon(g.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            if !arena.is_standable(spec.position) {
                return Err(ArenaError::BadPickup(spec.position));
            }
            arena.pickups.push(Pickup {
                kind: spec.kind,
                position: spec.position,
                grants,
                label: spec.grants.join("+"),
            });
        }
        arena.build_nav(cfg.nav_spacing)?;
        Ok(arena)
    }

    fn in_bounds(&self, p: [f64; 2]) -> bool {
        let r = CYLINDER_RADIUS;
        p[0] >= r && p[1] >= r && p[0] <= self.size - r && p[1] <= self.size - r
    }

    pub fn in_pit(&self, p: [f64; 2]) -> bool {
        self.pits.iter().any(|pit| pit.contains(p))
    }

    /// Inside the arena, clear of walls and not over a pit.
    pub fn is_standable(&self, p: [f64; 2]) -> bool {
        self.in_bounds(p) && !self.in_pit(p) && self.walls.iter().all(|w| w.distance_to(p) >= CYLINDER_RADIUS)
    }

    /// No wall crosses the segment.
    pub fn line_of_sight(&self, a: [f64; 2], b: [f64; 2]) -> bool {
        !self.walls.iter().any(|w| w.intersects(a, b))
    }

    /// A body at `a` can slide straight to `b`: walls keep a radius of clearance and no pit lies on the way.
    pub fn passable(&self, a: [f64; 2], b: [f64; 2]) -> bool {
        self.walls.iter().all(|w| segment_gap(w, a, b) >= CYLINDER_RADIUS)
            && !self.pits.iter().any(|pit| pit.intersects_segment(a, b))
    }

    /// A walker can follow the straight segment without touching walls or pits.
    pub fn walkable(&self, a: [f64; 2], b: [f64; 2]) -> bool {
        if !self.line_of_sight(a, b) {
            return false;
        }
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let steps = (len / 20.0).ceil().max(1.0) as usize;
        let clear_walls = (0..=steps).all(|i| {
            let t = i as f64 / steps as f64;
            let p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            self.walls.iter().all(|w| w.distance_to(p) >= CYLINDER_RADIUS + 2.0)
        });
        clear_walls && !self.pits.iter().any(|pit| pit.inflate(PIT_CLEARANCE).intersects_segment(a, b))
    }

    fn build_nav(&mut self, spacing: f64) -> Result<(), ArenaError> {
        let mut nodes: Vec<[f64; 2]> = Vec::new();
        let inset = spacing / 2.0;
        let count = ((self.size - 2.0 * inset) / spacing).floor() as usize;
        for i in 0..=count {
            for j in 0..=count {
                let p = [inset + i as f64 * spacing, inset + j as f64 * spacing];
                let near_pit = self.pits.iter().any(|pit| pit.inflate(PIT_CLEARANCE).contains(p));
                let near_wall = self.walls.iter().any(|w| w.distance_to(p) < 3.0 * CYLINDER_RADIUS);
                if self.in_bounds(p) && !near_pit && !near_wall {
                    nodes.push(p);
                }
            }
        }
        nodes.extend(self.spawns.iter().copied());
        nodes.extend(self.pickups.iter().map(|p| p.position));

        let n = nodes.len();
        let mut dist = vec![vec![f64::INFINITY; n]; n];
        let mut next = vec![vec![None; n]; n];
        for i in 0..n {
            dist[i][i] = 0.0;
            next[i][i] = Some(i);
            for j in (i + 1)..n {
                let d = (nodes[i][0] - nodes[j][0]).hypot(nodes[i][1] - nodes[j][1]);
                if d <= 1.6 * spacing && self.walkable(nodes[i], nodes[j]) {
                    dist[i][j] = d;
                    dist[j][i] = d;
                    next[i][j] = Some(j);
                    next[j][i] = Some(i);
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                if dist[i][k].is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let via = dist[i][k] + dist[k][j];
                    if via < dist[i][j] {
                        dist[i][j] = via;
                        next[i][j] = next[i][k];
                    }
                }
            }
        }
        if next.iter().any(|row| row.iter().any(Option::is_none)) {
            return Err(ArenaError::Disconnected);
        }
        self.nodes = nodes;
        self.next_hop = next;
        Ok(())
    }

    /// Next node to walk to on the shortest route from node `from` to node `to`.
    pub fn next_hop(&self, from: usize, to: usize) -> usize {
        self.next_hop[from][to].expect("graph is connected")
    }

    /// Closest node reachable in a straight walk from `p`, if any. Nodes that are merely visible
    /// are a fallback for bodies pressed against a wall.
    pub fn nearest_reachable_node(&self, p: [f64; 2]) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for (i, n) in self.nodes.iter().enumerate() {
            let d = (n[0] - p[0]).hypot(n[1] - p[1]);
            if best.is_some_and(|(bd, _)| bd <= d) {
                continue;
            }
            if self.passable(p, *n) {
                best = Some((d, i));
            }
        }
        best.map(|(_, i)| i).or_else(|| {
            self.nodes
                .iter()
                .enumerate()
                .filter(|(_, n)| self.line_of_sight(p, **n) && !self.pits.iter().any(|pit| pit.intersects_segment(p, **n)))
                .min_by(|(_, x), (_, y)| dist(p, **x).total_cmp(&dist(p, **y)))
                .map(|(i, _)| i)
        })
    }

    /// Node index of pickup `i`.
    pub fn pickup_node(&self, i: usize) -> usize {
        self.nodes.len() - self.pickups.len() + i
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Smallest distance between a wall and the segment `a → b`.
fn segment_gap(w: &Segment, a: [f64; 2], b: [f64; 2]) -> f64 {
    if w.intersects(a, b) {
        return 0.0;
    }
    let ab = Segment::new(a, b);
    w.distance_to(a).min(w.distance_to(b)).min(ab.distance_to(w.a)).min(ab.distance_to(w.b))
}

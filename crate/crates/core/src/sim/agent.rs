use serde::{Deserialize, Serialize};

use crate::geometry::{Cylinder, Vec3};
use crate::weapons::{Inventory, WeaponId, CYLINDER_HEIGHT, CYLINDER_RADIUS};

pub type AgentId = usize;

/// Scripted opponent skill profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpponentProfile {
    pub level: u8,
    /// Fraction of base movement speed.
    pub speed_fraction: f64,
    pub strafes: bool,
    pub dodges: bool,
    pub closes_distance: bool,
    /// Largest yaw error of a fire decision (degrees).
    pub max_aim_error: f64,
    /// Acquisition cone half-angle (degrees).
    pub fov: f64,
    /// Degrees per second.
    pub turn_rate: f64,
    /// Incoming projectiles closer than this trigger a dodge (UU).
    pub dodge_radius: f64,
    /// Longest time between strafe direction changes (s); the shortest is half of it.
    pub strafe_switch_s: f64,
}

impl OpponentProfile {
    pub fn level1() -> Self {
        OpponentProfile {
            level: 1,
            speed_fraction: 0.6,
            strafes: false,
            dodges: false,
            closes_distance: false,
            max_aim_error: 30.0,
            fov: 30.0,
            turn_rate: 180.0,
            dodge_radius: 0.0,
            strafe_switch_s: 0.0,
        }
    }

    pub fn level3() -> Self {
        OpponentProfile {
            level: 3,
            speed_fraction: 0.8,
            strafes: true,
            dodges: false,
            closes_distance: false,
            max_aim_error: 15.0,
            fov: 40.0,
            turn_rate: 270.0,
            dodge_radius: 0.0,
            strafe_switch_s: 1.2,
        }
    }

    pub fn level5() -> Self {
        OpponentProfile {
            level: 5,
            speed_fraction: 1.0,
            strafes: true,
            dodges: true,
            closes_distance: true,
            max_aim_error: 8.0,
            fov: 80.0,
            turn_rate: 360.0,
            dodge_radius: 450.0,
            strafe_switch_s: 0.6,
        }
    }

    pub fn for_level(level: u8) -> Option<Self> {
        match level {
            1 => Some(Self::level1()),
            3 => Some(Self::level3()),
            5 => Some(Self::level5()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Controller {
    Rl,
    Scripted(OpponentProfile),
}

impl Controller {
    pub fn speed_fraction(&self) -> f64 {
        match self {
            Controller::Rl => 1.0,
            Controller::Scripted(p) => p.speed_fraction,
        }
    }
}

/// Where a fire command points each tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AimCommand {
    Fixed(Vec3),
    /// Track `target` at `height` above its base every tick.
    LockedOn { target: AgentId, height: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FireCommand {
    pub weapon: WeaponId,
    pub aim: AimCommand,
    /// Yaw error applied to every shot of this command (degrees).
    pub yaw_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Movement {
    #[default]
    Stop,
    /// Walk towards a point and stop there.
    Toward([f64; 2]),
    /// Planar velocity (UU/s), clipped to the agent's top speed.
    Velocity([f64; 2]),
}

/// Controls an agent holds until its controller replaces them.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Control {
    pub movement: Movement,
    pub face_yaw: Option<f64>,
    /// Start a jump with this planar velocity (consumed on take-off).
    pub jump: Option<[f64; 2]>,
    pub fire: Option<FireCommand>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpArc {
    pub elapsed: f64,
    pub velocity: [f64; 2],
}

/// Source of the most recent damage, used to attribute a death.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DamageSource {
    pub attacker: AgentId,
    pub splash: bool,
}

/// Waypoint-following state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NavState {
    pub goal: Option<usize>,
    pub next: Option<usize>,
}

/// Scripted combat memory.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BotMemory {
    pub target: Option<AgentId>,
    pub strafe_sign: f64,
    pub strafe_timer: f64,
    /// Attacker to turn towards after being hit.
    pub alerted_by: Option<AgentId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub id: AgentId,
    /// Base of the collision cylinder; z is non-zero only mid-jump.
    pub position: Vec3,
    /// Planar velocity realised on the last tick (UU/s).
    pub velocity: [f64; 2],
    /// Facing, degrees counter-clockwise from +x.
    pub yaw: f64,
    pub health: f64,
    pub jump: Option<JumpArc>,
    pub inventory: Inventory,
    pub controller: Controller,
    pub alive: bool,
    pub respawn_timer: f64,
    pub control: Control,
    pub cooldown: f64,
    pub last_damage: Option<DamageSource>,
    pub max_speed: f64,
    pub turn_rate: f64,
    pub nav: NavState,
    pub memory: BotMemory,
    /// Completed lives; the current life has this index.
    pub life: u64,
}

impl AgentState {
    pub fn cylinder(&self) -> Cylinder {
        Cylinder {
            base: self.position,
            radius: CYLINDER_RADIUS,
            height: CYLINDER_HEIGHT,
        }
    }

    pub fn planar(&self) -> [f64; 2] {
        self.position.planar()
    }

    pub fn is_jumping(&self) -> bool {
        self.jump.is_some()
    }

    pub fn is_rl(&self) -> bool {
        matches!(self.controller, Controller::Rl)
    }

    pub fn level(&self) -> Option<u8> {
        match &self.controller {
            Controller::Rl => None,
            Controller::Scripted(p) => Some(p.level),
        }
    }
}

//! Discretisation of an engaged opponent's observed combat state.
//!
//! Six attributes are combined into a mixed-radix word:
//! distance (3) × speed (2) × jumping (2) × direction (9) × rotation (6) × instant hit (2),
//! giving 1296 distinct states.

use std::fmt;

use thiserror::Error;

/// Number of distinct combat states.
pub const NUM_STATES: usize = 3 * 2 * 2 * 9 * 6 * 2;

/// Upper bound of the `Close` distance band, inclusive (UU).
pub const CLOSE_MAX: f64 = 510.0;
/// Upper bound of the `Medium` distance band, inclusive (UU).
pub const MEDIUM_MAX: f64 = 1700.0;
/// Relative planar speed above which the opponent counts as fast (UU/s).
pub const FAST_SPEED: f64 = 800.0;
/// Velocity components below this magnitude are classed as no movement (UU/s).
pub const DIRECTION_DEAD_ZONE: f64 = 50.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodeError {
    #[error("distance must be finite and non-negative, got {0}")]
    InvalidDistance(f64),
    #[error("velocity components must be finite, got ({0}, {1})")]
    InvalidVelocity(f64, f64),
    #[error("line of sight must be a finite non-zero vector, got ({0}, {1})")]
    InvalidLineOfSight(f64, f64),
    #[error("facing angle {0} is outside [-180, 180)")]
    AngleOutOfRange(f64),
    #[error("state index {0} is outside [0, {NUM_STATES})")]
    StateOutOfRange(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DistanceBand {
    Close,
    Medium,
    Far,
}

impl DistanceBand {
    pub const ALL: [DistanceBand; 3] = [DistanceBand::Close, DistanceBand::Medium, DistanceBand::Far];

    pub fn name(self) -> &'static str {
        match self {
            DistanceBand::Close => "close",
            DistanceBand::Medium => "medium",
            DistanceBand::Far => "far",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpeedClass {
    Regular,
    Fast,
}

/// Movement along the bot→opponent line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Radial {
    Towards,
    None,
    Away,
}

/// Movement across the bot→opponent line, as seen from the bot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tangential {
    Left,
    None,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DirectionClass {
    pub radial: Radial,
    pub tangential: Tangential,
}

impl DirectionClass {
    pub const STATIONARY: DirectionClass = DirectionClass {
        radial: Radial::None,
        tangential: Tangential::None,
    };

    /// Row-major ordinal over radial × tangential, in `0..9`.
    pub fn ordinal(self) -> usize {
        self.radial as usize * 3 + self.tangential as usize
    }

    pub fn from_ordinal(ordinal: usize) -> Option<Self> {
        const RADIAL: [Radial; 3] = [Radial::Towards, Radial::None, Radial::Away];
        const TANGENTIAL: [Tangential; 3] = [Tangential::Left, Tangential::None, Tangential::Right];
        if ordinal >= 9 {
            return None;
        }
        Some(DirectionClass {
            radial: RADIAL[ordinal / 3],
            tangential: TANGENTIAL[ordinal % 3],
        })
    }
}

/// Which way the opponent faces relative to the line from the opponent to the bot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RotationSector {
    FrontRight1,
    FrontRight2,
    BackRight,
    BackLeft,
    FrontLeft2,
    FrontLeft1,
}

impl RotationSector {
    pub const ALL: [RotationSector; 6] = [
        RotationSector::FrontRight1,
        RotationSector::FrontRight2,
        RotationSector::BackRight,
        RotationSector::BackLeft,
        RotationSector::FrontLeft2,
        RotationSector::FrontLeft1,
    ];

    pub fn label(self) -> &'static str {
        match self {
            RotationSector::FrontRight1 => "FR1",
            RotationSector::FrontRight2 => "FR2",
            RotationSector::BackRight => "BR",
            RotationSector::BackLeft => "BL",
            RotationSector::FrontLeft2 => "FL2",
            RotationSector::FrontLeft1 => "FL1",
        }
    }
}

/// Raw perception of the opponent currently engaged.
///
/// Everything is planar: height differences and vertical velocity are ignored.
/// `facing_angle` is in degrees, 0 when the opponent looks straight at the bot and
/// positive when it has turned towards its own right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombatObservation {
    pub distance: f64,
    /// Opponent velocity minus bot velocity (UU/s).
    pub rel_velocity: [f64; 2],
    /// Unit vector from the bot towards the opponent.
    pub line_of_sight: [f64; 2],
    pub opponent_jumping: bool,
    pub facing_angle: f64,
    pub weapon_instant_hit: bool,
}

/// Wrap an angle in degrees into `[-180, 180)`.
pub fn normalize_degrees(angle: f64) -> f64 {
    let wrapped = (angle + 180.0).rem_euclid(360.0) - 180.0;
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if wrapped >= 180.0 {
        wrapped - 360.0
    } else {
        wrapped
    }
}

pub fn discretize_distance(distance: f64) -> Result<DistanceBand, EncodeError> {
    if !distance.is_finite() || distance < 0.0 {
        return Err(EncodeError::InvalidDistance(distance));
    }
    Ok(if distance <= CLOSE_MAX {
        DistanceBand::Close
    } else if distance <= MEDIUM_MAX {
        DistanceBand::Medium
    } else {
        DistanceBand::Far
    })
}

pub fn discretize_speed(vx: f64, vy: f64) -> Result<SpeedClass, EncodeError> {
    if !vx.is_finite() || !vy.is_finite() {
        return Err(EncodeError::InvalidVelocity(vx, vy));
    }
    Ok(if vx.hypot(vy) > FAST_SPEED {
        SpeedClass::Fast
    } else {
        SpeedClass::Regular
    })
}

/// Split the relative velocity into motion along and across the line of sight.
///
/// `line_of_sight` need not be normalised. Positive radial speed means the opponent
/// recedes; positive tangential speed means it moves to the bot's right.
pub fn classify_direction(
    rel_velocity: [f64; 2],
    line_of_sight: [f64; 2],
) -> Result<DirectionClass, EncodeError> {
    let [vx, vy] = rel_velocity;
    if !vx.is_finite() || !vy.is_finite() {
        return Err(EncodeError::InvalidVelocity(vx, vy));
    }
    let [lx, ly] = line_of_sight;
    let len = lx.hypot(ly);
    if !len.is_finite() || len == 0.0 {
        return Err(EncodeError::InvalidLineOfSight(lx, ly));
    }
    let (ux, uy) = (lx / len, ly / len);
    let radial_speed = vx * ux + vy * uy;
    // right-hand perpendicular of the viewing direction (counter-clockwise axes)
    let tangential_speed = vx * uy - vy * ux;

    let radial = if radial_speed.abs() < DIRECTION_DEAD_ZONE {
        Radial::None
    } else if radial_speed < 0.0 {
        Radial::Towards
    } else {
        Radial::Away
    };
    let tangential = if tangential_speed.abs() < DIRECTION_DEAD_ZONE {
        Tangential::None
    } else if tangential_speed > 0.0 {
        Tangential::Right
    } else {
        Tangential::Left
    };
    Ok(DirectionClass { radial, tangential })
}

pub fn discretize_rotation(facing_angle: f64) -> Result<RotationSector, EncodeError> {
    if !(-180.0..180.0).contains(&facing_angle) {
        return Err(EncodeError::AngleOutOfRange(facing_angle));
    }
    let sector = ((facing_angle.rem_euclid(360.0)) / 60.0).floor() as usize;
    Ok(RotationSector::ALL[sector.min(5)])
}

/// The discretised attribute tuple behind a [`StateId`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateAttributes {
    pub distance: DistanceBand,
    pub speed: SpeedClass,
    pub jumping: bool,
    pub direction: DirectionClass,
    pub rotation: RotationSector,
    pub instant_hit: bool,
}

impl StateAttributes {
    pub fn encode(&self) -> StateId {
        let mut index = self.distance as usize;
        index = index * 2 + self.speed as usize;
        index = index * 2 + self.jumping as usize;
        index = index * 9 + self.direction.ordinal();
        index = index * 6 + self.rotation as usize;
        index = index * 2 + self.instant_hit as usize;
        StateId(index as u16)
    }
}

/// Index of a discretised combat state, always below [`NUM_STATES`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(u16);

impl StateId {
    pub fn new(index: usize) -> Result<Self, EncodeError> {
        if index < NUM_STATES {
            Ok(StateId(index as u16))
        } else {
            Err(EncodeError::StateOutOfRange(index))
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn decode(self) -> StateAttributes {
        let mut rest = self.0 as usize;
        let instant_hit = rest % 2 == 1;
        rest /= 2;
        let rotation = RotationSector::ALL[rest % 6];
        rest /= 6;
        let direction = DirectionClass::from_ordinal(rest % 9).expect("ordinal below 9");
        rest /= 9;
        let jumping = rest % 2 == 1;
        rest /= 2;
        let speed = if rest % 2 == 1 { SpeedClass::Fast } else { SpeedClass::Regular };
        rest /= 2;
        let distance = DistanceBand::ALL[rest];
        StateAttributes {
            distance,
            speed,
            jumping,
            direction,
            rotation,
            instant_hit,
        }
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn attributes(obs: &CombatObservation) -> Result<StateAttributes, EncodeError> {
    Ok(StateAttributes {
        distance: discretize_distance(obs.distance)?,
        speed: discretize_speed(obs.rel_velocity[0], obs.rel_velocity[1])?,
        jumping: obs.opponent_jumping,
        direction: classify_direction(obs.rel_velocity, obs.line_of_sight)?,
        rotation: discretize_rotation(obs.facing_angle)?,
        instant_hit: obs.weapon_instant_hit,
    })
}

pub fn encode(obs: &CombatObservation) -> Result<StateId, EncodeError> {
    attributes(obs).map(|a| a.encode())
}

//! Weapon categories, their aim actions, the armory, and weapon selection.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoder::DistanceBand;
use crate::geometry::Vec3;

/// Aim actions available per weapon category.
pub const NUM_ACTIONS: usize = 5;

/// Height of the collision cylinder (UU).
pub const CYLINDER_HEIGHT: f64 = 39.0;
/// Radius of the collision cylinder (UU).
pub const CYLINDER_RADIUS: f64 = 17.0;

pub const HEAD_HEIGHT: f64 = CYLINDER_HEIGHT;
pub const MID_HEIGHT: f64 = CYLINDER_HEIGHT / 2.0;
pub const LEGS_HEIGHT: f64 = 4.0;

/// Miss penalty handed to the learner when shooting caused no damage.
pub const MISS_PENALTY: f64 = -1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeaponError {
    #[error("unknown weapon category `{0}`")]
    UnknownCategory(String),
    #[error("damage must be finite and non-negative, got {0}")]
    InvalidDamage(f64),
    #[error("weapon `{name}`: {reason}")]
    InvalidSpec { name: String, reason: String },
    #[error("priority table `{band}` names unknown weapon `{weapon}`")]
    UnknownPriorityWeapon { band: &'static str, weapon: String },
    #[error("priority table `{0}` is empty")]
    EmptyPriorityTable(&'static str),
    #[error("inventory holds no usable weapon")]
    EmptyInventory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeaponCategory {
    InstantHit,
    MachineGun,
    Projectile,
    SlowMoving,
    CloseRange,
    Other,
}

impl WeaponCategory {
    pub const ALL: [WeaponCategory; 6] = [
        WeaponCategory::InstantHit,
        WeaponCategory::MachineGun,
        WeaponCategory::Projectile,
        WeaponCategory::SlowMoving,
        WeaponCategory::CloseRange,
        WeaponCategory::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeaponCategory::InstantHit => "instant_hit",
            WeaponCategory::MachineGun => "machine_gun",
            WeaponCategory::Projectile => "projectile",
            WeaponCategory::SlowMoving => "slow_moving",
            WeaponCategory::CloseRange => "close_range",
            WeaponCategory::Other => "other",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for WeaponCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeaponCategory {
    type Err = WeaponError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        WeaponCategory::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| WeaponError::UnknownCategory(s.to_string()))
    }
}

/// How a shooting action picks its target point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AimKind {
    Head,
    Mid,
    Legs,
    Left,
    Right,
    Left2,
    Right2,
    Player,
    Location,
    Above,
    Above2,
    Above3,
}

impl AimKind {
    pub fn label(self) -> &'static str {
        match self {
            AimKind::Head => "Head",
            AimKind::Mid => "Mid",
            AimKind::Legs => "Legs",
            AimKind::Left => "Left",
            AimKind::Right => "Right",
            AimKind::Left2 => "Left-2",
            AimKind::Right2 => "Right-2",
            AimKind::Player => "Player",
            AimKind::Location => "Location",
            AimKind::Above => "Above",
            AimKind::Above2 => "Above-2",
            AimKind::Above3 => "Above-3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShootAction {
    pub category: WeaponCategory,
    pub index: usize,
    pub kind: AimKind,
}

impl ShootAction {
    pub fn label(&self) -> &'static str {
        self.kind.label()
    }
}

const fn column(category: WeaponCategory) -> [AimKind; NUM_ACTIONS] {
    use AimKind::*;
    match category {
        WeaponCategory::InstantHit => [Head, Mid, Legs, Left, Right],
        WeaponCategory::MachineGun => [Player, Location, Head, Left, Right],
        WeaponCategory::Projectile => [Player, Location, Above, Above2, Above3],
        WeaponCategory::SlowMoving => [Player, Left, Left2, Right, Right2],
        WeaponCategory::CloseRange => [Head, Mid, Legs, Left, Right],
        WeaponCategory::Other => [Head, Mid, Legs, Left, Right],
    }
}

pub fn actions_for(category: WeaponCategory) -> [ShootAction; NUM_ACTIONS] {
    let kinds = column(category);
    std::array::from_fn(|index| ShootAction {
        category,
        index,
        kind: kinds[index],
    })
}

pub fn action(category: WeaponCategory, index: usize) -> ShootAction {
    actions_for(category)[index]
}

/// Ballistic and damage parameters of one weapon fire mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeaponSpec {
    /// Identifier used in configuration, priority tables and report columns.
    pub id: String,
    pub name: String,
    pub category: WeaponCategory,
    pub instant_hit: bool,
    pub damage_per_hit: f64,
    #[serde(default = "one")]
    pub pellets: u32,
    /// Half-angle of the pellet cone (degrees).
    #[serde(default)]
    pub spread_deg: f64,
    pub fire_interval: f64,
    /// UU/s; ignored for instant-hit weapons.
    #[serde(default)]
    pub projectile_speed: f64,
    #[serde(default)]
    pub splash_radius: f64,
    #[serde(default)]
    pub self_damage: bool,
    pub aim_skew: f64,
    pub above_step: f64,
    /// Maximum reach (UU); 0 means unlimited.
    #[serde(default)]
    pub range: f64,
    /// Ammunition on pickup or spawn; 0 means unlimited.
    #[serde(default)]
    pub ammo: u32,
    #[serde(default)]
    pub max_ammo: u32,
}

fn one() -> u32 {
    1
}

impl WeaponSpec {
    pub fn validate(&self) -> Result<(), WeaponError> {
        let fail = |reason: &str| {
            Err(WeaponError::InvalidSpec {
                name: self.id.clone(),
                reason: reason.to_string(),
            })
        };
        if !(self.damage_per_hit > 0.0 && self.damage_per_hit.is_finite()) {
            return fail("damage_per_hit must be positive");
        }
        if !(self.fire_interval > 0.0 && self.fire_interval.is_finite()) {
            return fail("fire_interval must be positive");
        }
        if !(self.splash_radius >= 0.0 && self.splash_radius.is_finite()) {
            return fail("splash_radius must be non-negative");
        }
        if self.pellets == 0 {
            return fail("pellets must be at least 1");
        }
        if !self.instant_hit && !(self.projectile_speed > 0.0 && self.projectile_speed.is_finite()) {
            return fail("projectile weapons need a positive projectile_speed");
        }
        if self.range < 0.0 || self.aim_skew < 0.0 || self.above_step < 0.0 || self.spread_deg < 0.0 {
            return fail("range, aim_skew, above_step and spread_deg must be non-negative");
        }
        Ok(())
    }

    /// Whether a target this far away can be reached at all.
    pub fn in_range(&self, distance: f64) -> bool {
        self.range <= 0.0 || distance <= self.range
    }

    pub fn unlimited_ammo(&self) -> bool {
        self.ammo == 0
    }

    /// Projectile speed, infinite for instant-hit weapons.
    pub fn effective_speed(&self) -> f64 {
        if self.instant_hit {
            f64::INFINITY
        } else {
            self.projectile_speed
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn spec(
    id: &str,
    name: &str,
    category: WeaponCategory,
    instant_hit: bool,
    damage_per_hit: f64,
    fire_interval: f64,
    projectile_speed: f64,
    splash_radius: f64,
    self_damage: bool,
    ammo: u32,
) -> WeaponSpec {
    let aim_skew = match category {
        WeaponCategory::SlowMoving => 60.0,
        _ => 25.0,
    };
    WeaponSpec {
        id: id.to_string(),
        name: name.to_string(),
        category,
        instant_hit,
        damage_per_hit,
        pellets: 1,
        spread_deg: 0.0,
        fire_interval,
        projectile_speed,
        splash_radius,
        self_damage,
        aim_skew,
        above_step: 120.0,
        range: 0.0,
        ammo,
        max_ammo: ammo * 2,
    }
}

/// The stock weapon set.
pub fn default_armory() -> Vec<WeaponSpec> {
    use WeaponCategory::*;
    let mut flak = spec("flak_cannon", "Flak Cannon", CloseRange, false, 12.0, 0.9, 2500.0, 0.0, false, 15);
    flak.pellets = 9;
    flak.spread_deg = 6.0;
    flak.range = 1600.0;
    let mut shield = spec("shield_gun", "Shield Gun", CloseRange, true, 25.0, 0.8, 0.0, 0.0, false, 0);
    shield.range = 120.0;
    shield.max_ammo = 0;
    vec![
        spec("assault_rifle", "Assault Rifle", MachineGun, true, 7.0, 0.11, 0.0, 0.0, false, 100),
        spec("mini_gun", "Mini Gun", MachineGun, true, 8.0, 0.10, 0.0, 0.0, false, 100),
        spec("shock_rifle", "Shock Rifle", InstantHit, true, 45.0, 0.6, 0.0, 0.0, false, 20),
        spec("lightning_gun", "Lightning Gun", InstantHit, true, 70.0, 1.2, 0.0, 0.0, false, 15),
        spec("sniper_rifle", "Sniper Rifle", InstantHit, true, 60.0, 1.1, 0.0, 0.0, false, 15),
        spec("bio_rifle", "Bio Rifle", Projectile, false, 25.0, 0.4, 1300.0, 60.0, true, 20),
        spec("flak_cannon_alt", "Flak Cannon (secondary)", Projectile, false, 50.0, 0.9, 1200.0, 120.0, true, 15),
        spec("rocket_launcher", "Rocket Launcher", SlowMoving, false, 60.0, 0.95, 1000.0, 150.0, true, 12),
        spec("link_gun", "Link Gun", SlowMoving, false, 20.0, 0.25, 1200.0, 0.0, false, 50),
        flak,
        shield,
    ]
}

/// Ordered weapon preferences for each distance band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorityTables {
    pub close: Vec<String>,
    pub medium: Vec<String>,
    pub far: Vec<String>,
}

impl Default for PriorityTables {
    fn default() -> Self {
        let owned = |names: &[&str]| names.iter().map(|s| s.to_string()).collect();
        PriorityTables {
            close: owned(&["flak_cannon", "shock_rifle", "mini_gun", "link_gun", "assault_rifle", "shield_gun"]),
            medium: owned(&["shock_rifle", "rocket_launcher", "link_gun", "mini_gun", "flak_cannon_alt", "assault_rifle"]),
            far: owned(&["lightning_gun", "sniper_rifle", "shock_rifle", "link_gun", "assault_rifle"]),
        }
    }
}

impl PriorityTables {
    pub fn band(&self, band: DistanceBand) -> &[String] {
        match band {
            DistanceBand::Close => &self.close,
            DistanceBand::Medium => &self.medium,
            DistanceBand::Far => &self.far,
        }
    }

    pub fn validate(&self, armory: &Armory) -> Result<(), WeaponError> {
        for band in DistanceBand::ALL {
            let list = self.band(band);
            if list.is_empty() {
                return Err(WeaponError::EmptyPriorityTable(band.name()));
            }
            if let Some(unknown) = list.iter().find(|w| armory.index_of(w).is_none()) {
                return Err(WeaponError::UnknownPriorityWeapon {
                    band: band.name(),
                    weapon: unknown.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Index into an [`Armory`].
pub type WeaponId = usize;

/// The immutable set of weapon specs used by a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Armory {
    specs: Vec<WeaponSpec>,
}

pub const ASSAULT_RIFLE: &str = "assault_rifle";
pub const SHIELD_GUN: &str = "shield_gun";

impl Armory {
    pub fn new(specs: Vec<WeaponSpec>) -> Result<Self, WeaponError> {
        for spec in &specs {
            spec.validate()?;
        }
        for (i, spec) in specs.iter().enumerate() {
            if specs[..i].iter().any(|s| s.id == spec.id) {
                return Err(WeaponError::InvalidSpec {
                    name: spec.id.clone(),
                    reason: "duplicate weapon id".into(),
                });
            }
        }
        for required in [ASSAULT_RIFLE, SHIELD_GUN] {
            if !specs.iter().any(|s| s.id == required) {
                return Err(WeaponError::InvalidSpec {
                    name: required.into(),
                    reason: "spawn loadout weapon missing from armory".into(),
                });
            }
        }
        Ok(Armory { specs })
    }

    pub fn specs(&self) -> &[WeaponSpec] {
        &self.specs
    }

    pub fn get(&self, id: WeaponId) -> &WeaponSpec {
        &self.specs[id]
    }

    pub fn index_of(&self, id: &str) -> Option<WeaponId> {
        self.specs.iter().position(|s| s.id == id)
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }
}

impl Default for Armory {
    fn default() -> Self {
        Armory::new(default_armory()).expect("stock armory is valid")
    }
}

/// Per-agent ammunition, indexed by weapon id. `None` means not held.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Inventory {
    ammo: Vec<Option<u32>>,
}

impl Inventory {
    pub fn new(armory: &Armory) -> Self {
        Inventory {
            ammo: vec![None; armory.len()],
        }
    }

    /// Spawn loadout: assault rifle with its stock ammunition plus the shield gun.
    pub fn spawn_loadout(armory: &Armory) -> Self {
        let mut inv = Inventory::new(armory);
        for id in [ASSAULT_RIFLE, SHIELD_GUN] {
            let w = armory.index_of(id).expect("loadout weapon in armory");
            inv.ammo[w] = Some(armory.get(w).ammo);
        }
        inv
    }

    pub fn holds(&self, weapon: WeaponId) -> bool {
        self.ammo.get(weapon).is_some_and(|a| a.is_some())
    }

    pub fn ammo(&self, weapon: WeaponId) -> Option<u32> {
        self.ammo.get(weapon).copied().flatten()
    }

    pub fn has_ammo(&self, weapon: WeaponId, armory: &Armory) -> bool {
        match self.ammo(weapon) {
            Some(n) => n > 0 || armory.get(weapon).unlimited_ammo(),
            None => false,
        }
    }

    /// Add a weapon (or ammunition for it), capped at the spec's maximum.
    pub fn grant(&mut self, weapon: WeaponId, amount: u32, armory: &Armory) {
        let spec = armory.get(weapon);
        let slot = &mut self.ammo[weapon];
        let current = slot.unwrap_or(0);
        let cap = if spec.max_ammo == 0 { u32::MAX } else { spec.max_ammo };
        *slot = Some(current.saturating_add(amount).min(cap));
    }

    /// Use one round; returns false when the weapon cannot fire.
    pub fn consume(&mut self, weapon: WeaponId, armory: &Armory) -> bool {
        if armory.get(weapon).unlimited_ammo() {
            return self.holds(weapon);
        }
        match &mut self.ammo[weapon] {
            Some(n) if *n > 0 => {
                *n -= 1;
                true
            }
            _ => false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.ammo.iter().all(Option::is_none)
    }
}

/// Best held weapon with ammunition for the distance band.
///
/// Falls back to the assault rifle and then the shield gun when nothing listed is usable.
pub fn select_weapon(
    inventory: &Inventory,
    band: DistanceBand,
    tables: &PriorityTables,
    armory: &Armory,
) -> Result<WeaponId, WeaponError> {
    if inventory.is_empty() {
        return Err(WeaponError::EmptyInventory);
    }
    let listed = tables.band(band).iter().filter_map(|name| armory.index_of(name));
    let fallback = [ASSAULT_RIFLE, SHIELD_GUN].into_iter().filter_map(|name| armory.index_of(name));
    listed
        .chain(fallback)
        .find(|&w| inventory.has_ammo(w, armory))
        .ok_or(WeaponError::EmptyInventory)
}

/// Reward for the damage a shooting step caused.
pub fn reward_for(damage: f64) -> Result<f64, WeaponError> {
    if !damage.is_finite() || damage < 0.0 {
        return Err(WeaponError::InvalidDamage(damage));
    }
    Ok(if damage > 0.0 { damage } else { MISS_PENALTY })
}

/// Where a resolved shooting action points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AimTarget {
    /// Aim at a fixed world point until the next decision.
    Fixed(Vec3),
    /// Re-target the opponent at `height` above its base every tick.
    LockedOn { height: f64 },
}

/// Resolve an action against the opponent as currently observed.
///
/// `opponent` is the base (feet) point of the opponent's collision cylinder. Lateral
/// offsets are perpendicular to the planar shooter→opponent line; "left" is the
/// shooter's left with counter-clockwise axes.
pub fn resolve_aim(action: &ShootAction, shooter: Vec3, opponent: Vec3, weapon: &WeaponSpec) -> AimTarget {
    let mid = Vec3::new(opponent.x, opponent.y, opponent.z + MID_HEIGHT);
    let (dx, dy) = (opponent.x - shooter.x, opponent.y - shooter.y);
    let len = dx.hypot(dy);
    // unit vector to the shooter's left; degenerate when standing on top of the target
    let left = if len > 0.0 { (-dy / len, dx / len) } else { (0.0, 0.0) };
    let lateral = |amount: f64| Vec3::new(mid.x + left.0 * amount, mid.y + left.1 * amount, mid.z);
    let raised = |steps: f64| Vec3::new(mid.x, mid.y, mid.z + steps * weapon.above_step);

    let point = match action.kind {
        AimKind::Player => return AimTarget::LockedOn { height: MID_HEIGHT },
        AimKind::Head => Vec3::new(opponent.x, opponent.y, opponent.z + HEAD_HEIGHT),
        AimKind::Mid | AimKind::Location => mid,
        AimKind::Legs => Vec3::new(opponent.x, opponent.y, opponent.z + LEGS_HEIGHT),
        AimKind::Left => lateral(weapon.aim_skew),
        AimKind::Right => lateral(-weapon.aim_skew),
        AimKind::Left2 => lateral(2.0 * weapon.aim_skew),
        AimKind::Right2 => lateral(-2.0 * weapon.aim_skew),
        AimKind::Above => raised(1.0),
        AimKind::Above2 => raised(2.0),
        AimKind::Above3 => raised(3.0),
    };
    AimTarget::Fixed(point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn weapon(id: &str) -> WeaponSpec {
        default_armory().into_iter().find(|w| w.id == id).unwrap()
    }

    #[test]
    fn action_columns() {
        let labels = |c| actions_for(c).map(|a| a.label());
        assert_eq!(labels(WeaponCategory::InstantHit), ["Head", "Mid", "Legs", "Left", "Right"]);
        assert_eq!(labels(WeaponCategory::MachineGun), ["Player", "Location", "Head", "Left", "Right"]);
        assert_eq!(labels(WeaponCategory::Projectile), ["Player", "Location", "Above", "Above-2", "Above-3"]);
        assert_eq!(labels(WeaponCategory::SlowMoving), ["Player", "Left", "Left-2", "Right", "Right-2"]);
        assert_eq!(labels(WeaponCategory::CloseRange), ["Head", "Mid", "Legs", "Left", "Right"]);
        assert_eq!(labels(WeaponCategory::Other), ["Head", "Mid", "Legs", "Left", "Right"]);
        let pairs: usize = WeaponCategory::ALL.iter().map(|&c| actions_for(c).len()).sum();
        assert_eq!(pairs, 30);
        assert_eq!(crate::encoder::NUM_STATES * pairs, 38_880);
    }

    #[test]
    fn category_names_round_trip() {
        for c in WeaponCategory::ALL {
            assert_eq!(c.name().parse::<WeaponCategory>().unwrap(), c);
        }
        assert!("laser".parse::<WeaponCategory>().is_err());
    }

    #[test]
    fn head_and_player_aim() {
        let shock = weapon("shock_rifle");
        let head = action(WeaponCategory::InstantHit, 0);
        let aim = resolve_aim(&head, Vec3::new(0.0, 0.0, 0.0), Vec3::new(100.0, 200.0, 0.0), &shock);
        assert_eq!(aim, AimTarget::Fixed(Vec3::new(100.0, 200.0, 39.0)));

        let rocket = weapon("rocket_launcher");
        let player = action(WeaponCategory::SlowMoving, 0);
        assert!(matches!(
            resolve_aim(&player, Vec3::ZERO, Vec3::new(10.0, 0.0, 0.0), &rocket),
            AimTarget::LockedOn { .. }
        ));
    }

    #[test]
    fn left_skews_to_shooter_left() {
        let shock = weapon("shock_rifle");
        let left = action(WeaponCategory::InstantHit, 3);
        // shooter looks along +x, so its left is +y
        let aim = resolve_aim(&left, Vec3::ZERO, Vec3::new(500.0, 0.0, 0.0), &shock);
        assert_eq!(aim, AimTarget::Fixed(Vec3::new(500.0, 25.0, MID_HEIGHT)));
    }

    #[test]
    fn above_variants_are_ordered() {
        let bio = weapon("bio_rifle");
        let z = |i| match resolve_aim(&action(WeaponCategory::Projectile, i), Vec3::ZERO, Vec3::new(800.0, 300.0, 0.0), &bio) {
            AimTarget::Fixed(p) => p.z,
            AimTarget::LockedOn { .. } => unreachable!(),
        };
        assert_eq!(z(1), MID_HEIGHT);
        assert!(z(4) > z(3) && z(3) > z(2) && z(2) > z(1));
    }

    proptest! {
        #[test]
        fn left_right_mirror(sx in -2000.0f64..2000.0, sy in -2000.0f64..2000.0, ox in -2000.0f64..2000.0, oy in -2000.0f64..2000.0) {
            prop_assume!((sx - ox).hypot(sy - oy) > 1.0);
            let link = weapon("link_gun");
            let shooter = Vec3::new(sx, sy, 0.0);
            let opp = Vec3::new(ox, oy, 0.0);
            for (l, r) in [(1, 3), (2, 4)] {
                let (AimTarget::Fixed(a), AimTarget::Fixed(b)) = (
                    resolve_aim(&action(WeaponCategory::SlowMoving, l), shooter, opp, &link),
                    resolve_aim(&action(WeaponCategory::SlowMoving, r), shooter, opp, &link),
                ) else { unreachable!() };
                // midpoint lies on the shooter-opponent line and the offsets are symmetric
                let mx = (a.x + b.x) / 2.0;
                let my = (a.y + b.y) / 2.0;
                prop_assert!((mx - ox).abs() < 1e-9 && (my - oy).abs() < 1e-9);
                let along = (a.x - b.x) * (ox - sx) + (a.y - b.y) * (oy - sy);
                prop_assert!(along.abs() < 1e-6);
            }
        }
    }

    #[test]
    fn weapon_selection() {
        let armory = Armory::default();
        let tables = PriorityTables::default();
        let flak = armory.index_of("flak_cannon").unwrap();
        let ar = armory.index_of(ASSAULT_RIFLE).unwrap();
        let shield = armory.index_of(SHIELD_GUN).unwrap();

        let mut inv = Inventory::new(&armory);
        inv.grant(flak, 10, &armory);
        inv.grant(ar, 50, &armory);
        assert_eq!(select_weapon(&inv, DistanceBand::Close, &tables, &armory), Ok(flak));

        let loadout = Inventory::spawn_loadout(&armory);
        for band in DistanceBand::ALL {
            assert_eq!(select_weapon(&loadout, band, &tables, &armory), Ok(ar));
        }

        let mut dry = Inventory::spawn_loadout(&armory);
        dry.grant(flak, 0, &armory);
        assert!(dry.holds(flak));
        assert_eq!(select_weapon(&dry, DistanceBand::Close, &tables, &armory), Ok(ar));
        while dry.consume(ar, &armory) {}
        assert_eq!(select_weapon(&dry, DistanceBand::Far, &tables, &armory), Ok(shield));

        assert_eq!(
            select_weapon(&Inventory::new(&armory), DistanceBand::Far, &tables, &armory),
            Err(WeaponError::EmptyInventory)
        );
    }

    #[test]
    fn rewards() {
        assert_eq!(reward_for(0.0), Ok(-1.0));
        assert_eq!(reward_for(35.0), Ok(35.0));
        assert_eq!(reward_for(1e-300), Ok(1e-300));
        assert!(reward_for(-1.0).is_err());
        assert!(reward_for(f64::NAN).is_err());
    }

    #[test]
    fn default_tables_are_consistent() {
        let armory = Armory::default();
        PriorityTables::default().validate(&armory).unwrap();
        let bad = PriorityTables {
            close: vec!["bfg".into()],
            ..PriorityTables::default()
        };
        assert!(bad.validate(&armory).is_err());
    }
}

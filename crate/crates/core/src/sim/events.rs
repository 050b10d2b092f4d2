use std::fmt;

use super::agent::{AgentId, DamageSource};
use super::arena::PickupKind;
use crate::weapons::WeaponId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeathCause {
    Pit,
    Damage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuicideCause {
    Pit,
    SelfSplash,
}

impl SuicideCause {
    pub fn name(self) -> &'static str {
        match self {
            SuicideCause::Pit => "pit",
            SuicideCause::SelfSplash => "self_splash",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    Pickup {
        agent: AgentId,
        item: usize,
        kind: PickupKind,
    },
    ShotFired {
        shooter: AgentId,
        shot: u64,
        weapon: WeaponId,
    },
    /// `amount` is what was actually taken off the victim's health.
    Damage {
        attacker: AgentId,
        victim: AgentId,
        amount: f64,
        weapon: WeaponId,
        shot: u64,
    },
    /// Every pellet of a shot has landed or expired.
    ShotResolved {
        shooter: AgentId,
        shot: u64,
        weapon: WeaponId,
        hit: bool,
    },
    Kill {
        killer: AgentId,
        victim: AgentId,
    },
    Suicide {
        victim: AgentId,
        cause: SuicideCause,
    },
    Spawn {
        agent: AgentId,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimEvent {
    pub tick: u64,
    pub kind: EventKind,
}

impl fmt::Display for SimEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.tick)?;
        match &self.kind {
            EventKind::Pickup { agent, item, kind } => write!(f, "pickup {agent} {item} {kind:?}"),
            EventKind::ShotFired { shooter, shot, weapon } => write!(f, "fire {shooter} {shot} {weapon}"),
            EventKind::Damage {
                attacker,
                victim,
                amount,
                weapon,
                shot,
            } => write!(f, "damage {attacker} {victim} {amount} {weapon} {shot}"),
            EventKind::ShotResolved { shooter, shot, weapon, hit } => {
                write!(f, "resolve {shooter} {shot} {weapon} {hit}")
            }
            EventKind::Kill { killer, victim } => write!(f, "kill {killer} {victim}"),
            EventKind::Suicide { victim, cause } => write!(f, "suicide {victim} {}", cause.name()),
            EventKind::Spawn { agent } => write!(f, "spawn {agent}"),
        }
    }
}

/// Decide whether a death is a kill or a suicide.
///
/// Falling into a pit is always a suicide, even when someone else knocked the victim
/// there. Lethal damage is a suicide when the victim was its own last attacker (self
/// splash) and a kill credited to the last attacker otherwise.
pub fn attribute_death(victim: AgentId, last: Option<DamageSource>, cause: DeathCause) -> EventKind {
    match (cause, last) {
        (DeathCause::Pit, _) | (DeathCause::Damage, None) => EventKind::Suicide {
            victim,
            cause: SuicideCause::Pit,
        },
        (DeathCause::Damage, Some(src)) if src.attacker == victim => EventKind::Suicide {
            victim,
            cause: SuicideCause::SelfSplash,
        },
        (DeathCause::Damage, Some(src)) => EventKind::Kill {
            killer: src.attacker,
            victim,
        },
    }
}

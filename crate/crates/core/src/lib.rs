//! A deterministic FPS combat arena in which a bot learns how to aim each weapon
//! category online with tabular Sarsa(λ), plus the experiment harness around it.

pub mod config;
pub mod encoder;
pub mod geometry;
pub mod harness;
pub mod rl;
pub mod sim;
pub mod weapons;

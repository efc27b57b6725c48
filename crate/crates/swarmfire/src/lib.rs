//! Deterministic 2D simulator for a firefighting drone swarm that avoids
//! mid-air collisions through an environmental signal field.
//!
//! Every airborne drone deposits an inverse-square intensity into a shared
//! field; each drone samples the cumulative field on a compass stencil
//! around itself and retreats down the gradient. That repulsion is blended
//! into the usual inertia-plus-attraction trajectory update, so collision
//! avoidance and mission seeking run through one recurrence.
//!
//! There is no randomness anywhere: identical configs produce bitwise
//! identical runs, which is what makes the collision-count experiments in
//! [`sweep`] reproducible.

pub mod collisions;
pub mod config;
pub mod dynamics;
pub mod engine;
pub mod mission;
pub mod signal;
pub mod sweep;
pub mod terrain;
pub mod vec2;

pub use collisions::{CollisionEvent, CollisionMode, MetricsRecord};
pub use config::{emit_config, parse_config, ConfigError, SimConfig};
pub use engine::{RunResult, SimState, Termination};
pub use vec2::Vec2;

//! Overlap detection and the per-run metrics record.
//!
//! Drones are points; a collision is two airborne drones closer than the
//! collision radius. The primary count is edge-triggered: a pair entering
//! overlap scores once until it separates again. A per-tick mode counts
//! every overlapping pair every tick instead, for sensitivity checks.

use crate::vec2::Vec2;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CollisionMode {
    /// Count rising edges of pair overlap.
    Event,
    /// Count every overlapping pair on every tick.
    PerTick,
}

/// One counted collision. `drone_a < drone_b` always.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollisionEvent {
    pub time: f64,
    pub drone_a: usize,
    pub drone_b: usize,
    pub pos_a: Vec2,
    pub pos_b: Vec2,
}

/// Tracks which pairs are currently overlapping so edges can be detected.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OverlapTracker {
    current: BTreeSet<(usize, usize)>,
}

impl OverlapTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Scans all pairs of the given airborne drones (id-ascending) and
    /// returns the events this tick under `mode`. Pairs with a grounded
    /// drone simply never appear in the input.
    pub fn detect(
        &mut self,
        drones: &[(usize, Vec2)],
        r_col: f64,
        time: f64,
        mode: CollisionMode,
    ) -> Vec<CollisionEvent> {
        let r_sq = r_col * r_col;
        let mut now = BTreeSet::new();
        let mut events = Vec::new();
        for i in 0..drones.len() {
            for j in (i + 1)..drones.len() {
                let (a, pa) = drones[i];
                let (b, pb) = drones[j];
                debug_assert!(a < b);
                if pa.distance_squared(pb) < r_sq {
                    now.insert((a, b));
                    let rising = !self.current.contains(&(a, b));
                    if mode == CollisionMode::PerTick || rising {
                        events.push(CollisionEvent {
                            time,
                            drone_a: a,
                            drone_b: b,
                            pos_a: pa,
                            pos_b: pb,
                        });
                    }
                }
            }
        }
        self.current = now;
        events
    }
}

/// Headline numbers of one run, matching the sweep table columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    /// Collision count C.
    pub collisions: u64,
    /// Mission duration T in seconds.
    pub duration: f64,
    pub cruise_speed: f64,
    pub sampling_frequency: f64,
    pub f_over_v: f64,
    pub c_over_t: f64,
}

/// Computes the derived ratios. A zero duration yields a zero rate rather
/// than a division artifact; it only occurs for runs that never stepped.
pub fn finalize_metrics(collisions: u64, duration: f64, v: f64, f: f64) -> MetricsRecord {
    MetricsRecord {
        collisions,
        duration,
        cruise_speed: v,
        sampling_frequency: f,
        f_over_v: f / v,
        c_over_t: if duration > 0.0 {
            collisions as f64 / duration
        } else {
            0.0
        },
    }
}

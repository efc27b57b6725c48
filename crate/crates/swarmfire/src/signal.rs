//! Scalar signal field used for reciprocal collision avoidance.
//!
//! Every airborne drone emits an isotropic signal whose strength falls off as
//! the inverse square of distance and saturates inside a reference radius.
//! Each drone samples the cumulative field on an eight-point compass stencil
//! around itself, estimates the local gradient, and derives a repulsion point
//! on the opposite side of the slope. Moving toward that point steers the
//! drone away from signal concentrations, i.e. away from other drones.

use crate::vec2::Vec2;
use serde::{Deserialize, Serialize};

/// One emitting drone. `r_ref` is the saturation radius in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSource {
    pub position: Vec2,
    pub r_ref: f64,
}

/// Snapshot of all emitters for one decision step, in drone id order.
///
/// Summation order is fixed by the collection order, which keeps cumulative
/// intensities bit-reproducible across reruns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SignalSourceSet {
    pub sources: Vec<SignalSource>,
}

impl SignalSourceSet {
    pub fn new(sources: Vec<SignalSource>) -> Self {
        SignalSourceSet { sources }
    }
}

/// Field values sampled on the compass stencil around an agent.
///
/// Axis samples sit at distance `spacing` from the center, diagonal samples
/// at `(±spacing, ±spacing)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilSamples {
    pub e: f64,
    pub w: f64,
    pub n: f64,
    pub s: f64,
    pub ne: f64,
    pub nw: f64,
    pub se: f64,
    pub sw: f64,
    pub spacing: f64,
}

/// Signal strength of a single source at `point`.
///
/// Inverse-square law `r_ref^2 / r^2` beyond the saturation radius, exactly 1
/// inside it. Continuous at `r = r_ref` and free of singularities at `r = 0`.
pub fn source_intensity(source: &SignalSource, point: Vec2) -> f64 {
    let r_sq = source.position.distance_squared(point);
    let r_ref_sq = source.r_ref * source.r_ref;
    if r_sq > r_ref_sq {
        r_ref_sq / r_sq
    } else {
        1.0
    }
}

/// Sum of all source intensities at `point`. An empty set yields 0.
pub fn cumulative_intensity(set: &SignalSourceSet, point: Vec2) -> f64 {
    set.sources
        .iter()
        .map(|src| source_intensity(src, point))
        .sum()
}

/// Samples the cumulative field on the eight compass points around `center`.
pub fn sample_stencil(set: &SignalSourceSet, center: Vec2, spacing: f64) -> StencilSamples {
    debug_assert!(spacing > 0.0);
    let d = spacing;
    let at = |dx: f64, dy: f64| cumulative_intensity(set, center + Vec2::new(dx, dy));
    StencilSamples {
        e: at(d, 0.0),
        w: at(-d, 0.0),
        n: at(0.0, d),
        s: at(0.0, -d),
        ne: at(d, d),
        nw: at(-d, d),
        se: at(d, -d),
        sw: at(-d, -d),
        spacing,
    }
}

/// Gradient estimate from the compass samples.
///
/// Axis differences carry weight 1, diagonal differences weight 1/2, with a
/// `1/(6*spacing)` normalization. On an affine field `a*x + b*y + c` this
/// evaluates to `(2a/3, 2b/3)`: a systematic 2/3 of the true slope, which
/// downstream gains absorb. The difference grouping below is arranged so that
/// mirror-symmetric sample sets produce exactly mirrored gradients.
pub fn gradient(samples: &StencilSamples) -> Vec2 {
    let StencilSamples {
        e,
        w,
        n,
        s,
        ne,
        nw,
        se,
        sw,
        spacing,
    } = *samples;
    let gx = ((e - w) + 0.5 * ((ne - nw) + (se - sw))) / (6.0 * spacing);
    let gy = ((n - s) + 0.5 * ((ne - se) + (nw - sw))) / (6.0 * spacing);
    Vec2::new(gx, gy)
}

/// Repulsion point for an agent at `agent`: one `k_sigma`-scaled gradient
/// step downhill. Near another emitter the gradient points toward it, so the
/// repulsor lands on the far side of the agent.
pub fn repulsor(agent: Vec2, gradient: Vec2, k_sigma: f64) -> Vec2 {
    agent - k_sigma * gradient
}

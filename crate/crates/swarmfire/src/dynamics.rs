//! Oscillatory trajectory dynamics for individual drones.
//!
//! Each drone follows a momentum-plus-attraction difference equation: the
//! next commanded position is the current one plus an inertia term and an
//! acceleration term pulling toward the (collision-corrected) attractor. The
//! acceleration coefficient is fixed at the midpoint of a band chosen so the
//! one-step recurrence has complex characteristic roots, which makes the
//! drone orbit its attractor instead of converging monotonically; the orbit
//! doubles as deterministic local exploration.

use crate::vec2::Vec2;
use serde::{Deserialize, Serialize};

/// Movement and avoidance gains shared by every drone in a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsoParams {
    /// Inertia weight, strictly inside (0, 1).
    pub omega: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    /// Attractor correction weight, 0 <= k_ca < 1. Zero disables avoidance.
    pub k_ca: f64,
    /// Gradient-to-metres gain of the repulsor step.
    pub k_sigma: f64,
    /// Cruise speed v in m/s; per-step displacement is capped at v / f.
    pub cruise_speed: f64,
    /// Decision frequency f in Hz; one tick advances 1 / f seconds.
    pub sampling_frequency: f64,
    /// Compass stencil spacing in metres.
    pub stencil_spacing: f64,
    /// Deterministic stand-in for the uniform draw inside the acceleration
    /// band, in [0, 1]. 0.5 picks the midpoint.
    pub phi_fraction: f64,
}

impl PsoParams {
    /// Builds the parameter set, deriving the acceleration band from `omega`.
    pub fn new(
        omega: f64,
        k_ca: f64,
        k_sigma: f64,
        cruise_speed: f64,
        sampling_frequency: f64,
        stencil_spacing: f64,
        phi_fraction: f64,
    ) -> Self {
        let (phi_min, phi_max) = phi_bounds(omega);
        PsoParams {
            omega,
            phi_min,
            phi_max,
            k_ca,
            k_sigma,
            cruise_speed,
            sampling_frequency,
            stencil_spacing,
            phi_fraction,
        }
    }

    /// Duration of one decision step in seconds.
    pub fn dt(&self) -> f64 {
        1.0 / self.sampling_frequency
    }
}

/// Position memory for the difference equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentKinematics {
    pub x_prev: Vec2,
    pub x_curr: Vec2,
    /// Last commanded (unclamped) target.
    pub x_target: Vec2,
}

impl AgentKinematics {
    /// A drone at rest: no velocity history, target on itself.
    pub fn at_rest(position: Vec2) -> Self {
        AgentKinematics {
            x_prev: position,
            x_curr: position,
            x_target: position,
        }
    }
}

/// Acceleration coefficient band `((sqrt(omega) - 1)^2, (sqrt(omega) + 1)^2)`.
///
/// For `omega` in (0, 1) any coefficient strictly inside the band gives the
/// recurrence complex roots of magnitude `sqrt(omega)`: decaying oscillation
/// around the attractor. Callers must validate `omega` beforehand; the open
/// interval is a configuration-level constraint.
pub fn phi_bounds(omega: f64) -> (f64, f64) {
    let s = omega.sqrt();
    ((s - 1.0) * (s - 1.0), (s + 1.0) * (s + 1.0))
}

/// Deterministic acceleration coefficient: the midpoint of the band, equal on
/// both axes. Algebraically the midpoint is `omega + 1`.
pub fn acceleration_coefficient(params: &PsoParams) -> Vec2 {
    let c = params.phi_min + params.phi_fraction * (params.phi_max - params.phi_min);
    Vec2::new(c, c)
}

/// Characteristic discriminant of the recurrence for coefficient `phi`.
/// Negative means complex roots, i.e. oscillatory approach.
pub fn oscillation_discriminant(omega: f64, phi: f64) -> f64 {
    let b = omega + 1.0 - phi;
    b * b - 4.0 * omega
}

/// Collision-corrected attractor: convex blend of the mission attractor `p`
/// and the repulsor `q`.
pub fn blend_attractor(p: Vec2, q: Vec2, k_ca: f64) -> Vec2 {
    (1.0 - k_ca) * p + k_ca * q
}

/// Next commanded position: inertia plus attraction toward `p_star`.
pub fn target_update(kin: &AgentKinematics, p_star: Vec2, params: &PsoParams) -> Vec2 {
    let phi = acceleration_coefficient(params);
    kin.x_curr + params.omega * (kin.x_curr - kin.x_prev) + phi.hadamard(p_star - kin.x_curr)
}

/// Moves from `x_curr` toward `x_target`, at most `v * dt` metres.
/// The realized displacement of the returned point never exceeds the
/// budget, including the rounding of the final addition.
pub fn apply_speed_limit(x_curr: Vec2, x_target: Vec2, v: f64, dt: f64) -> Vec2 {
    let diff = x_target - x_curr;
    let dist = diff.norm();
    let limit = v * dt;
    if dist <= limit {
        return x_target;
    }
    let mut reach = limit;
    loop {
        let next = x_curr + Vec2::new(diff.x * reach / dist, diff.y * reach / dist);
        if next.distance(x_curr) <= limit {
            return next;
        }
        reach *= 1.0 - 1e-9;
    }
}

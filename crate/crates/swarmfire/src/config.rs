//! Run configuration: TOML file format, defaults, validation, and the
//! canonical emitter.
//!
//! Parsing is fail-closed: unknown keys, malformed syntax, and out-of-range
//! values are all hard errors that name the offending key (and its line
//! where recoverable). An empty file yields the full default scenario.

use crate::collisions::CollisionMode;
use crate::dynamics::PsoParams;
use crate::mission::MissionParams;
use crate::terrain::FireParams;
use crate::vec2::Vec2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    /// Syntax, type, or unknown-key failure; the message carries the
    /// line and column from the parser.
    #[error("config syntax error: {0}")]
    Syntax(String),
    #[error("config error: {key} (line {line}): {message}")]
    InvalidAt {
        key: String,
        line: usize,
        message: String,
    },
    #[error("config error: {key}: {message}")]
    Invalid { key: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwarmSection {
    pub drone_count: usize,
    /// Inertia weight of the trajectory recurrence, 0 < omega < 1.
    pub omega: f64,
    /// Attractor correction weight, 0 <= k_ca < 1.
    pub k_ca: f64,
    /// Repulsor gain in m^2 (gradient units to metres).
    pub k_sigma: f64,
    /// Cruise speed v in m/s.
    pub cruise_speed: f64,
    /// Decision frequency f in Hz.
    pub sampling_frequency: f64,
    /// Signal saturation radius in metres.
    pub r_ref: f64,
    /// Compass stencil spacing; defaults to 2 * r_ref when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stencil_spacing: Option<f64>,
    /// Deterministic stand-in for the uniform draw in the acceleration band,
    /// in [0, 1]; 0.5 picks the midpoint.
    pub phi_fraction: f64,
}

impl Default for SwarmSection {
    fn default() -> Self {
        SwarmSection {
            drone_count: 100,
            omega: 0.7,
            k_ca: 0.7,
            k_sigma: 1000.0,
            cruise_speed: 10.0,
            sampling_frequency: 30.0,
            r_ref: 0.3,
            stencil_spacing: None,
            phi_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArenaSection {
    /// Domain extent in metres; drones operate in [0, width] x [0, height].
    pub width: f64,
    pub height: f64,
    pub water_source: [f64; 2],
    /// Docking and charging station.
    pub dock: [f64; 2],
    /// Center of the hovering/waiting rectangle.
    pub waiting_center: [f64; 2],
    pub waiting_size: [f64; 2],
    pub ignition_points: Vec<[f64; 2]>,
}

impl Default for ArenaSection {
    fn default() -> Self {
        ArenaSection {
            width: 100.0,
            height: 100.0,
            water_source: [5.0, 95.0],
            dock: [5.0, 5.0],
            waiting_center: [50.0, 50.0],
            waiting_size: [20.0, 20.0],
            ignition_points: vec![[30.0, 60.0], [55.0, 55.0], [70.0, 30.0]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FireSection {
    pub cell_size: f64,
    pub ambient_temperature: f64,
    pub ignition_temperature: f64,
    pub flame_temperature: f64,
    pub burn_rate: f64,
    pub diffusion_rate: f64,
    pub cooling_rate: f64,
    pub quench_per_unit: f64,
    pub initial_fuel: f64,
}

impl Default for FireSection {
    fn default() -> Self {
        FireSection {
            cell_size: 1.0,
            ambient_temperature: 300.0,
            ignition_temperature: 550.0,
            flame_temperature: 1100.0,
            burn_rate: 0.008,
            diffusion_rate: 0.30,
            cooling_rate: 0.12,
            quench_per_unit: 600.0,
            initial_fuel: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MissionSection {
    pub battery_threshold: f64,
    pub water_threshold: f64,
    /// Seconds of flight per full charge.
    pub flight_time: f64,
    pub service_radius: f64,
    pub landing_slots: usize,
    /// Seconds the grid must stay cold before fires count as out.
    pub confirmation_window: f64,
    /// Payload fraction released per decision step.
    pub pour_quantum: f64,
    pub sensing_radius: f64,
}

impl Default for MissionSection {
    fn default() -> Self {
        MissionSection {
            battery_threshold: 0.2,
            water_threshold: 0.3,
            flight_time: 600.0,
            service_radius: 2.0,
            landing_slots: 6,
            confirmation_window: 5.0,
            pour_quantum: 0.05,
            sensing_radius: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Collision radius; defaults to 2 * r_ref when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_col: Option<f64>,
    pub max_sim_time: f64,
    pub collision_mode: CollisionMode,
    /// This build is fully deterministic; the flag documents (and enforces)
    /// that no stochastic variant is available.
    pub random_free: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            r_col: None,
            max_sim_time: 3600.0,
            collision_mode: CollisionMode::Event,
            random_free: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub swarm: SwarmSection,
    pub arena: ArenaSection,
    pub fire: FireSection,
    pub mission: MissionSection,
    pub run: RunSection,
}

impl SimConfig {
    /// Bench-sized scenario for fast experiments: a 50 m square, 20 drones,
    /// one ignition point.
    pub fn desk_scale() -> Self {
        let mut cfg = SimConfig::default();
        cfg.swarm.drone_count = 20;
        cfg.arena.width = 50.0;
        cfg.arena.height = 50.0;
        cfg.arena.water_source = [15.0, 25.0];
        cfg.arena.dock = [4.0, 4.0];
        cfg.arena.waiting_center = [40.0, 40.0];
        cfg.arena.waiting_size = [12.0, 12.0];
        cfg.arena.ignition_points = vec![[25.0, 25.0]];
        cfg
    }

    pub fn stencil_spacing(&self) -> f64 {
        self.swarm.stencil_spacing.unwrap_or(2.0 * self.swarm.r_ref)
    }

    pub fn r_col(&self) -> f64 {
        self.run.r_col.unwrap_or(2.0 * self.swarm.r_ref)
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.swarm.sampling_frequency
    }

    pub fn water_source(&self) -> Vec2 {
        Vec2::new(self.arena.water_source[0], self.arena.water_source[1])
    }

    pub fn dock(&self) -> Vec2 {
        Vec2::new(self.arena.dock[0], self.arena.dock[1])
    }

    pub fn waiting_center(&self) -> Vec2 {
        Vec2::new(self.arena.waiting_center[0], self.arena.waiting_center[1])
    }

    pub fn waiting_size(&self) -> Vec2 {
        Vec2::new(self.arena.waiting_size[0], self.arena.waiting_size[1])
    }

    pub fn ignition_points(&self) -> Vec<Vec2> {
        self.arena
            .ignition_points
            .iter()
            .map(|p| Vec2::new(p[0], p[1]))
            .collect()
    }

    pub fn pso_params(&self) -> PsoParams {
        PsoParams::new(
            self.swarm.omega,
            self.swarm.k_ca,
            self.swarm.k_sigma,
            self.swarm.cruise_speed,
            self.swarm.sampling_frequency,
            self.stencil_spacing(),
            self.swarm.phi_fraction,
        )
    }

    pub fn fire_params(&self) -> FireParams {
        FireParams {
            ambient_temperature: self.fire.ambient_temperature,
            ignition_temperature: self.fire.ignition_temperature,
            flame_temperature: self.fire.flame_temperature,
            burn_rate: self.fire.burn_rate,
            diffusion_rate: self.fire.diffusion_rate,
            cooling_rate: self.fire.cooling_rate,
            quench_per_unit: self.fire.quench_per_unit,
        }
    }

    pub fn mission_params(&self) -> MissionParams {
        MissionParams {
            battery_threshold: self.mission.battery_threshold,
            water_threshold: self.mission.water_threshold,
            flight_time: self.mission.flight_time,
            service_radius: self.mission.service_radius,
            landing_slots: self.mission.landing_slots,
            confirmation_window: self.mission.confirmation_window,
            pour_quantum: self.mission.pour_quantum,
            sensing_radius: self.mission.sensing_radius,
            hot_threshold: self.fire.ignition_temperature,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.check().map_err(|(key, message)| ConfigError::Invalid {
            key: key.to_string(),
            message,
        })
    }

    fn check(&self) -> Result<(), (&'static str, String)> {
        let s = &self.swarm;
        if s.drone_count == 0 {
            return Err(("swarm.drone_count", "must be at least 1".into()));
        }
        if !(s.omega > 0.0 && s.omega < 1.0) {
            return Err((
                "swarm.omega",
                format!("must satisfy 0 < omega < 1 (got {})", s.omega),
            ));
        }
        if !(s.k_ca >= 0.0 && s.k_ca < 1.0) {
            return Err((
                "swarm.k_ca",
                format!("must satisfy 0 \u{2264} k_ca < 1 (got {})", s.k_ca),
            ));
        }
        if !(s.k_sigma.is_finite() && s.k_sigma >= 0.0) {
            return Err(("swarm.k_sigma", "must be finite and non-negative".into()));
        }
        if !(s.cruise_speed > 0.0) {
            return Err(("swarm.cruise_speed", "must be positive".into()));
        }
        if !(s.sampling_frequency > 0.0) {
            return Err(("swarm.sampling_frequency", "must be positive".into()));
        }
        if !(s.r_ref > 0.0) {
            return Err(("swarm.r_ref", "must be positive".into()));
        }
        if let Some(d) = s.stencil_spacing {
            if !(d > 0.0) {
                return Err(("swarm.stencil_spacing", "must be positive".into()));
            }
        }
        if !(s.phi_fraction >= 0.0 && s.phi_fraction <= 1.0) {
            return Err((
                "swarm.phi_fraction",
                format!("must lie in [0, 1] (got {})", s.phi_fraction),
            ));
        }

        let a = &self.arena;
        if !(a.width > 0.0 && a.height > 0.0) {
            return Err(("arena.width", "domain extents must be positive".into()));
        }
        let inside = |p: &[f64; 2]| {
            (0.0..=a.width).contains(&p[0]) && (0.0..=a.height).contains(&p[1])
        };
        if !inside(&a.water_source) {
            return Err(("arena.water_source", "must lie inside the domain".into()));
        }
        if !inside(&a.dock) {
            return Err(("arena.dock", "must lie inside the domain".into()));
        }
        if !inside(&a.waiting_center)
            || a.waiting_size[0] < 0.0
            || a.waiting_size[1] < 0.0
            || a.waiting_center[0] - a.waiting_size[0] / 2.0 < 0.0
            || a.waiting_center[0] + a.waiting_size[0] / 2.0 > a.width
            || a.waiting_center[1] - a.waiting_size[1] / 2.0 < 0.0
            || a.waiting_center[1] + a.waiting_size[1] / 2.0 > a.height
        {
            return Err((
                "arena.waiting_center",
                "waiting rectangle must lie inside the domain".into(),
            ));
        }
        for p in &a.ignition_points {
            if !inside(p) {
                return Err((
                    "arena.ignition_points",
                    format!("point [{}, {}] lies outside the domain", p[0], p[1]),
                ));
            }
        }

        let f = &self.fire;
        if !(f.cell_size > 0.0 && f.cell_size <= a.width.min(a.height)) {
            return Err((
                "fire.cell_size",
                "must be positive and no larger than the domain".into(),
            ));
        }
        if !(f.ambient_temperature >= 0.0) {
            return Err(("fire.ambient_temperature", "must be non-negative".into()));
        }
        if !(f.ambient_temperature < f.ignition_temperature
            && f.ignition_temperature < f.flame_temperature)
        {
            return Err((
                "fire.ignition_temperature",
                "temperatures must satisfy ambient < ignition < flame".into(),
            ));
        }
        for (key, v) in [
            ("fire.burn_rate", f.burn_rate),
            ("fire.diffusion_rate", f.diffusion_rate),
            ("fire.cooling_rate", f.cooling_rate),
            ("fire.quench_per_unit", f.quench_per_unit),
            ("fire.initial_fuel", f.initial_fuel),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return match key {
                    "fire.burn_rate" => Err(("fire.burn_rate", "must be non-negative".into())),
                    "fire.diffusion_rate" => {
                        Err(("fire.diffusion_rate", "must be non-negative".into()))
                    }
                    "fire.cooling_rate" => {
                        Err(("fire.cooling_rate", "must be non-negative".into()))
                    }
                    "fire.quench_per_unit" => {
                        Err(("fire.quench_per_unit", "must be non-negative".into()))
                    }
                    _ => Err(("fire.initial_fuel", "must be non-negative".into())),
                };
            }
        }
        let dt = 1.0 / s.sampling_frequency;
        if dt * (4.0 * f.diffusion_rate + f.cooling_rate) > 1.0 {
            return Err((
                "fire.diffusion_rate",
                format!(
                    "fire step is unstable: (4 * diffusion_rate + cooling_rate) / \
                     sampling_frequency must not exceed 1 (got {})",
                    dt * (4.0 * f.diffusion_rate + f.cooling_rate)
                ),
            ));
        }

        let m = &self.mission;
        if !(0.0..=1.0).contains(&m.battery_threshold) {
            return Err(("mission.battery_threshold", "must lie in [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&m.water_threshold) {
            return Err(("mission.water_threshold", "must lie in [0, 1]".into()));
        }
        if !(m.flight_time > 0.0) {
            return Err(("mission.flight_time", "must be positive".into()));
        }
        if !(m.service_radius > 0.0) {
            return Err(("mission.service_radius", "must be positive".into()));
        }
        if m.landing_slots == 0 {
            return Err(("mission.landing_slots", "must be at least 1".into()));
        }
        if !(m.confirmation_window >= 0.0) {
            return Err(("mission.confirmation_window", "must be non-negative".into()));
        }
        if !(m.pour_quantum > 0.0 && m.pour_quantum <= 1.0) {
            return Err(("mission.pour_quantum", "must lie in (0, 1]".into()));
        }
        if !(m.sensing_radius > 0.0) {
            return Err(("mission.sensing_radius", "must be positive".into()));
        }

        let r = &self.run;
        if let Some(rc) = r.r_col {
            if !(rc > 0.0) {
                return Err(("run.r_col", "must be positive".into()));
            }
        }
        if !(r.max_sim_time > 0.0) {
            return Err(("run.max_sim_time", "must be positive".into()));
        }
        if !r.random_free {
            return Err((
                "run.random_free",
                "no stochastic variant exists; the flag must stay true".into(),
            ));
        }
        Ok(())
    }
}

/// Parses and validates a config file. Bound violations are reported with
/// the offending key and, when it appears literally in the text, its line.
pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    let cfg: SimConfig =
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    cfg.check().map_err(|(key, message)| {
        match find_key_line(text, key.rsplit('.').next().unwrap_or(key)) {
            Some(line) => ConfigError::InvalidAt {
                key: key.to_string(),
                line,
                message,
            },
            None => ConfigError::Invalid {
                key: key.to_string(),
                message,
            },
        }
    })?;
    Ok(cfg)
}

/// Canonical serialization; `parse_config(emit_config(c))` equals `c`.
pub fn emit_config(cfg: &SimConfig) -> String {
    toml::to_string_pretty(cfg).expect("config serializes")
}

fn find_key_line(text: &str, key: &str) -> Option<usize> {
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim_start();
        if let Some(rest) = trimmed.strip_prefix(key) {
            if rest.trim_start().starts_with('=') {
                return Some(i + 1);
            }
        }
    }
    None
}

//! The simulation engine: one deterministic tick pipeline and the run loop.
//!
//! Each tick advances seven stages: freeze the signal field, move every
//! airborne drone against that frozen field, settle resources (drain,
//! refill, recharge, water drops), advance the fire, update knowledge and
//! phases, detect collisions, and advance the clock. Every stage either
//! reads only pre-stage state or commits its writes in a fixed order, so
//! the result is independent of the order drones are visited in; the test
//! suite steps permuted orders and asserts equality.
//!
//! All cross-drone aggregation (signal sums, shared knowledge, water drops,
//! collision scans) happens in drone id order, which makes whole runs
//! bit-reproducible.

use crate::collisions::{finalize_metrics, CollisionEvent, MetricsRecord, OverlapTracker};
use crate::config::SimConfig;
use crate::dynamics::{self, AgentKinematics, PsoParams};
use crate::mission::{
    self, AttractorChoice, AttractorContext, DroneResources, MissionParams, MissionPhase,
    SwarmKnowledge, SweepPlan, WorldView,
};
use crate::signal::{self, SignalSource, SignalSourceSet};
use crate::terrain::{self, FireParams, TerrainGrid};
use crate::vec2::Vec2;
use serde::Serialize;

/// Dock parking pitch in metres; wider than the default collision radius so
/// parked drones never overlap.
const DOCK_SLOT_SPACING: f64 = 1.5;

/// Seconds the whole swarm must stay landed (with a cold grid) before the
/// run counts as complete.
const LANDED_HOLD_SECONDS: f64 = 60.0;

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    /// Fires out, every drone landed, and both held for the full hold window.
    MissionComplete,
    /// The configured time budget ran out first.
    TimeBudgetExceeded,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::MissionComplete => write!(f, "mission complete"),
            Termination::TimeBudgetExceeded => write!(f, "time budget exceeded"),
        }
    }
}

/// One phase transition of one drone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseChange {
    pub time: f64,
    pub drone: usize,
    pub from: MissionPhase,
    pub to: MissionPhase,
}

/// End-of-run terrain aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSummary {
    pub cells_ever_ignited: usize,
    pub peak_temperature: f64,
    pub fuel_remaining: f64,
}

/// Everything a finished run reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub metrics: MetricsRecord,
    pub termination: Termination,
    /// Time-averaged mean pairwise distance between firefighting drones,
    /// None when no tick ever had two of them.
    pub firefighting_dispersion: Option<f64>,
    pub grid: GridSummary,
    pub timeline: Vec<PhaseChange>,
    pub events: Vec<CollisionEvent>,
}

/// Per-drone line of a tick dump.
#[derive(Debug, Clone, Serialize)]
pub struct DroneSnapshot {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub phase: MissionPhase,
    pub water: f64,
    pub battery: f64,
}

/// One JSON-lines record of `--dump-ticks` output.
#[derive(Debug, Clone, Serialize)]
pub struct TickSnapshot {
    pub tick: u64,
    pub time: f64,
    pub hot_cells: usize,
    pub drones: Vec<DroneSnapshot>,
}

#[derive(Debug, Clone)]
struct DroneState {
    kin: AgentKinematics,
    resources: DroneResources,
    phase: MissionPhase,
    /// Index into the sweep plan: next search waypoint while firefighting
    /// blind, next assigned waypoint while checking.
    sweep_cursor: usize,
    dock_slot: Vec2,
    hover_slot: Vec2,
    /// Mission attractor selected at the end of the previous tick.
    attractor: AttractorChoice,
}

/// Full mutable state of one simulation.
pub struct SimState {
    cfg: SimConfig,
    pso: PsoParams,
    fire: FireParams,
    mission: MissionParams,
    grid: TerrainGrid,
    plan: SweepPlan,
    drones: Vec<DroneState>,
    knowledge: SwarmKnowledge,
    tracker: OverlapTracker,
    identity: Vec<usize>,
    tick: u64,
    time: f64,
    /// Last instant any cell was at or above ignition; None means never.
    last_hot_time: Option<f64>,
    believed_out: bool,
    landed_ticks: u64,
    required_landed_ticks: u64,
    collision_count: u64,
    events: Vec<CollisionEvent>,
    timeline: Vec<PhaseChange>,
    dispersion_sum: f64,
    dispersion_ticks: u64,
}

impl SimState {
    /// Builds the initial state: drones docked on the parking grid, full
    /// batteries, empty tanks, ignition points lit.
    pub fn new(cfg: &SimConfig) -> Self {
        debug_assert!(cfg.validate().is_ok());
        let n = cfg.swarm.drone_count;
        let pso = cfg.pso_params();
        let fire = cfg.fire_params();
        let mission_params = cfg.mission_params();
        let mut grid = TerrainGrid::new(
            cfg.arena.width,
            cfg.arena.height,
            cfg.fire.cell_size,
            cfg.fire.ambient_temperature,
            cfg.fire.initial_fuel,
        );
        terrain::ignite(&mut grid, &cfg.ignition_points(), &fire);
        let plan = SweepPlan::generate(cfg.arena.width, cfg.arena.height, mission_params.sensing_radius);
        let docks = mission::dock_slots(cfg.dock(), n, DOCK_SLOT_SPACING);
        let hovers = mission::hover_slots(cfg.waiting_center(), cfg.waiting_size(), n);
        let drones = (0..n)
            .map(|i| DroneState {
                kin: AgentKinematics::at_rest(docks[i]),
                resources: DroneResources {
                    water_level: 0.0,
                    battery_level: 1.0,
                },
                phase: MissionPhase::Docked,
                sweep_cursor: 0,
                dock_slot: docks[i],
                hover_slot: hovers[i],
                attractor: AttractorChoice {
                    point: docks[i],
                    hot_target: false,
                },
            })
            .collect();
        let grid_hot = grid.hot_cell_count(&fire) > 0;
        SimState {
            pso,
            fire,
            mission: mission_params,
            grid,
            plan,
            drones,
            knowledge: SwarmKnowledge::new(n),
            tracker: OverlapTracker::new(),
            identity: (0..n).collect(),
            tick: 0,
            time: 0.0,
            last_hot_time: if grid_hot { Some(0.0) } else { None },
            believed_out: false,
            landed_ticks: 0,
            required_landed_ticks: (LANDED_HOLD_SECONDS * cfg.swarm.sampling_frequency).ceil()
                as u64,
            collision_count: 0,
            events: Vec::new(),
            timeline: Vec::new(),
            dispersion_sum: 0.0,
            dispersion_ticks: 0,
            cfg: cfg.clone(),
        }
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn drone_count(&self) -> usize {
        self.drones.len()
    }

    pub fn drone_position(&self, i: usize) -> Vec2 {
        self.drones[i].kin.x_curr
    }

    pub fn drone_phase(&self, i: usize) -> MissionPhase {
        self.drones[i].phase
    }

    pub fn drone_resources(&self, i: usize) -> DroneResources {
        self.drones[i].resources
    }

    pub fn collision_events(&self) -> &[CollisionEvent] {
        &self.events
    }

    pub fn grid(&self) -> &TerrainGrid {
        &self.grid
    }

    pub fn hot_cells(&self) -> usize {
        self.grid.hot_cell_count(&self.fire)
    }

    pub fn fires_out(&self) -> bool {
        terrain::all_fires_out(&self.grid, &self.fire)
    }

    pub fn believed_out(&self) -> bool {
        self.believed_out
    }

    /// Advances one tick, visiting drones in id order.
    pub fn step(&mut self) {
        let order = std::mem::take(&mut self.identity);
        self.step_with_order(&order);
        self.identity = order;
    }

    /// Advances one tick visiting drones in the given order. The outcome is
    /// identical for every permutation; integration tests assert this.
    pub fn step_with_order(&mut self, order: &[usize]) {
        let n = self.drones.len();
        debug_assert_eq!(order.len(), n);
        let dt = self.pso.dt();
        let now = (self.tick + 1) as f64 * dt;
        let water_source = self.cfg.water_source();
        let dock = self.cfg.dock();

        // Freeze the field: airborne emitters at pre-step positions, id order.
        let airborne: Vec<bool> = self.drones.iter().map(|d| d.phase.is_airborne()).collect();
        let emitters: Vec<(usize, SignalSource)> = self
            .drones
            .iter()
            .enumerate()
            .filter(|&(i, _)| airborne[i])
            .map(|(i, d)| {
                (
                    i,
                    SignalSource {
                        position: d.kin.x_curr,
                        r_ref: self.cfg.swarm.r_ref,
                    },
                )
            })
            .collect();

        // Move every airborne drone against the frozen field, then commit.
        let mut moves: Vec<Option<AgentKinematics>> = vec![None; n];
        let mut others = SignalSourceSet::default();
        for &i in order {
            if !airborne[i] {
                continue;
            }
            let kin = self.drones[i].kin;
            others.sources.clear();
            others.sources.extend(
                emitters
                    .iter()
                    .filter(|&&(j, _)| j != i)
                    .map(|&(_, s)| s),
            );
            let samples = signal::sample_stencil(&others, kin.x_curr, self.pso.stencil_spacing);
            let grad = signal::gradient(&samples);
            let q = signal::repulsor(kin.x_curr, grad, self.pso.k_sigma);
            let p_star = dynamics::blend_attractor(self.drones[i].attractor.point, q, self.pso.k_ca);
            let target = dynamics::target_update(&kin, p_star, &self.pso);
            let stepped = dynamics::apply_speed_limit(kin.x_curr, target, self.pso.cruise_speed, dt);
            let clamped = Vec2::new(
                stepped.x.clamp(0.0, self.cfg.arena.width),
                stepped.y.clamp(0.0, self.cfg.arena.height),
            );
            moves[i] = Some(AgentKinematics {
                x_prev: kin.x_curr,
                x_curr: clamped,
                x_target: target,
            });
        }
        for &i in order {
            if let Some(kin) = moves[i] {
                self.drones[i].kin = kin;
            }
        }

        // Resources: drain while airborne, service at the dock and the water
        // source, collect water drops and apply them in (cell, id) order.
        let mut pours: Vec<(usize, usize)> = Vec::new();
        for &i in order {
            if !airborne[i] {
                continue;
            }
            let d = &mut self.drones[i];
            d.resources.battery_level =
                (d.resources.battery_level - dt / self.mission.flight_time).max(0.0);
            match d.phase {
                MissionPhase::Recharging
                    if d.kin.x_curr.distance(d.dock_slot) <= self.mission.service_radius =>
                {
                    d.resources.battery_level = 1.0;
                }
                MissionPhase::WaterCollection
                    if d.kin.x_curr.distance(water_source) <= self.mission.service_radius =>
                {
                    d.resources.water_level = 1.0;
                }
                MissionPhase::Firefighting
                    if d.attractor.hot_target
                        && d.resources.water_level > 0.0
                        && d.kin.x_curr.distance(d.attractor.point) <= self.grid.cell_size() =>
                {
                    if let Some(cell) = self.grid.cell_index(d.attractor.point) {
                        pours.push((cell, i));
                    }
                }
                _ => {}
            }
        }
        pours.sort_unstable();
        for (cell, i) in pours {
            let amount = self
                .mission
                .pour_quantum
                .min(self.drones[i].resources.water_level);
            let center = self.grid.cell_center(cell);
            terrain::pour_water(&mut self.grid, &self.fire, center, amount);
            self.drones[i].resources.water_level -= amount;
        }

        terrain::step_fire(&mut self.grid, &self.fire, dt);

        // Sense the cell under each drone, then share in id order.
        let mut measurements: Vec<Option<(Vec2, f64)>> = vec![None; n];
        for &i in order {
            if airborne[i] {
                let pos = self.drones[i].kin.x_curr;
                measurements[i] = terrain::hotspot_measurement(&self.grid, pos).map(|t| (pos, t));
            }
        }
        for (i, m) in measurements.iter().enumerate() {
            if let Some((pos, t)) = m {
                self.knowledge.record_and_share(i, *pos, *t);
            }
        }

        // Believed-out tracking; a rising edge starts a fresh check sweep.
        if self.grid.hot_cell_count(&self.fire) > 0 {
            self.last_hot_time = Some(now);
        }
        let believed_out = match self.last_hot_time {
            None => true,
            Some(t) => now - t >= self.mission.confirmation_window,
        };
        if believed_out && !self.believed_out {
            self.knowledge.reset();
            for d in &mut self.drones {
                d.sweep_cursor = 0;
            }
        }
        self.believed_out = believed_out;

        // Sweep progress: checking drones tick off assigned waypoints,
        // searching firefighters walk the shared serpentine until the swarm
        // knows a hot spot.
        for &i in order {
            match self.drones[i].phase {
                MissionPhase::Check => {
                    let cursor = self.drones[i].sweep_cursor;
                    if cursor < self.plan.assigned_count(i, n) {
                        if let Some(w) = self.plan.assigned_waypoint(i, n, cursor) {
                            if self.drones[i].kin.x_curr.distance(w) <= self.mission.sensing_radius
                            {
                                self.drones[i].sweep_cursor += 1;
                            }
                        }
                    }
                }
                MissionPhase::Firefighting => {
                    let discovered = self
                        .knowledge
                        .swarm_best()
                        .map_or(false, |b| b.temperature >= self.mission.hot_threshold);
                    if !discovered {
                        let w = self.plan.search_waypoint(self.drones[i].sweep_cursor);
                        if self.drones[i].kin.x_curr.distance(w) <= self.mission.sensing_radius {
                            self.drones[i].sweep_cursor += 1;
                        }
                    }
                }
                _ => {}
            }
        }

        // Landing slots go to the nearest sweep-complete drones still up.
        let granted: Vec<usize> = if believed_out {
            let candidates: Vec<(usize, Vec2)> = (0..n)
                .filter(|&i| self.drones[i].phase.is_airborne() && self.sweep_complete(i))
                .map(|i| (i, self.drones[i].kin.x_curr))
                .collect();
            mission::landing_priority(&candidates, dock, self.mission.landing_slots)
        } else {
            Vec::new()
        };

        // Phase transitions, committed in id order; touchdowns drop inertia.
        let mut next_phase = vec![MissionPhase::Docked; n];
        for &i in order {
            let d = &self.drones[i];
            let view = WorldView {
                fires_believed_out: believed_out,
                sweep_complete: self.sweep_complete(i),
                landing_granted: granted.binary_search(&i).is_ok(),
                dist_to_own_dock_slot: d.kin.x_curr.distance(d.dock_slot),
            };
            next_phase[i] = mission::update_phase(d.phase, &d.resources, &view, &self.mission);
        }
        for i in 0..n {
            let from = self.drones[i].phase;
            let to = next_phase[i];
            if from != to {
                self.timeline.push(PhaseChange {
                    time: now,
                    drone: i,
                    from,
                    to,
                });
                if to == MissionPhase::Landed {
                    let pos = self.drones[i].kin.x_curr;
                    self.drones[i].kin = AgentKinematics::at_rest(pos);
                }
                self.drones[i].phase = to;
            }
        }

        // Attractors for the next tick, from post-transition phases.
        for &i in order {
            let d = &self.drones[i];
            self.drones[i].attractor = mission::select_attractor(&AttractorContext {
                phase: d.phase,
                drone: i,
                n_drones: n,
                knowledge: &self.knowledge,
                sweep: &self.plan,
                sweep_cursor: d.sweep_cursor,
                dock_slot: d.dock_slot,
                hover_slot: d.hover_slot,
                water_source,
                hot_threshold: self.mission.hot_threshold,
            });
        }

        // Collisions and swarm spread on the end-of-tick state.
        let colliders: Vec<(usize, Vec2)> = (0..n)
            .filter(|&i| self.drones[i].phase.is_airborne())
            .map(|i| (i, self.drones[i].kin.x_curr))
            .collect();
        let new_events =
            self.tracker
                .detect(&colliders, self.cfg.r_col(), now, self.cfg.run.collision_mode);
        self.collision_count += new_events.len() as u64;
        self.events.extend(new_events);

        let fighters: Vec<Vec2> = (0..n)
            .filter(|&i| self.drones[i].phase == MissionPhase::Firefighting)
            .map(|i| self.drones[i].kin.x_curr)
            .collect();
        if fighters.len() >= 2 {
            let mut sum = 0.0;
            let mut pairs = 0u64;
            for a in 0..fighters.len() {
                for b in (a + 1)..fighters.len() {
                    sum += fighters[a].distance(fighters[b]);
                    pairs += 1;
                }
            }
            self.dispersion_sum += sum / pairs as f64;
            self.dispersion_ticks += 1;
        }

        // Clock, and the landed-hold counter toward mission completion.
        self.tick += 1;
        self.time = self.tick as f64 * dt;
        let all_landed = self
            .drones
            .iter()
            .all(|d| d.phase == MissionPhase::Landed);
        if all_landed && terrain::all_fires_out(&self.grid, &self.fire) {
            self.landed_ticks += 1;
        } else {
            self.landed_ticks = 0;
        }
    }

    fn sweep_complete(&self, i: usize) -> bool {
        self.drones[i].sweep_cursor >= self.plan.assigned_count(i, self.drones.len())
    }

    /// Whether the run is over, and why.
    pub fn termination(&self) -> Option<Termination> {
        if self.landed_ticks >= self.required_landed_ticks {
            Some(Termination::MissionComplete)
        } else if self.time >= self.cfg.run.max_sim_time {
            Some(Termination::TimeBudgetExceeded)
        } else {
            None
        }
    }

    /// Steps until termination and reports the run.
    pub fn run(&mut self) -> RunResult {
        loop {
            self.step();
            if let Some(t) = self.termination() {
                return self.result(t);
            }
        }
    }

    /// Assembles the report for a finished run.
    pub fn result(&self, termination: Termination) -> RunResult {
        RunResult {
            metrics: finalize_metrics(
                self.collision_count,
                self.time,
                self.pso.cruise_speed,
                self.pso.sampling_frequency,
            ),
            termination,
            firefighting_dispersion: if self.dispersion_ticks > 0 {
                Some(self.dispersion_sum / self.dispersion_ticks as f64)
            } else {
                None
            },
            grid: GridSummary {
                cells_ever_ignited: self.grid.cells_ever_ignited(),
                peak_temperature: self.grid.peak_temperature(),
                fuel_remaining: self.grid.total_fuel(),
            },
            timeline: self.timeline.clone(),
            events: self.events.clone(),
        }
    }

    pub fn tick_snapshot(&self) -> TickSnapshot {
        TickSnapshot {
            tick: self.tick,
            time: self.time,
            hot_cells: self.hot_cells(),
            drones: self
                .drones
                .iter()
                .enumerate()
                .map(|(id, d)| DroneSnapshot {
                    id,
                    x: d.kin.x_curr.x,
                    y: d.kin.x_curr.y,
                    phase: d.phase,
                    water: d.resources.water_level,
                    battery: d.resources.battery_level,
                })
                .collect(),
        }
    }
}

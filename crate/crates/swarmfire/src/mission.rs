//! Mission logic: per-drone phase machine, shared hot-spot knowledge,
//! deterministic search sweeps, and landing arbitration.
//!
//! Phase priority, highest first: recharging when the battery runs low,
//! refilling when water runs low while fires remain, the post-fire
//! check/landing sequence once nothing burns, and firefighting otherwise.
//! Every rule is a pure function of the drone's state and a world view
//! computed once per tick, so phase updates are order-independent.

use crate::vec2::Vec2;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MissionPhase {
    /// Pre-takeoff state on the dock grid.
    Docked,
    Firefighting,
    WaterCollection,
    Recharging,
    /// Post-suppression sweep confirming nothing still burns.
    Check,
    /// Waiting for a landing slot over the waiting area.
    Hovering,
    Landing,
    Landed,
}

impl MissionPhase {
    /// Airborne drones move, emit signal, and can collide.
    pub fn is_airborne(self) -> bool {
        !matches!(self, MissionPhase::Docked | MissionPhase::Landed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DroneResources {
    /// Payload fraction in [0, 1].
    pub water_level: f64,
    /// Charge fraction in [0, 1].
    pub battery_level: f64,
}

/// Mission-level thresholds and geometry shared by the whole swarm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MissionParams {
    /// Battery fraction below which a drone breaks off to recharge.
    pub battery_threshold: f64,
    /// Water fraction below which a firefighting drone goes refilling.
    pub water_threshold: f64,
    /// Seconds of flight a full battery provides.
    pub flight_time: f64,
    /// Refill, recharge, and touchdown all happen within this radius.
    pub service_radius: f64,
    /// Maximum number of drones in Landing at the same time.
    pub landing_slots: usize,
    /// Seconds the grid must stay cold before fires count as out.
    pub confirmation_window: f64,
    /// Payload fraction released per decision step while dousing.
    pub pour_quantum: f64,
    /// Radius of the temperature scan each drone performs per step.
    pub sensing_radius: f64,
    /// Measurements at or above this count as a discovered fire.
    pub hot_threshold: f64,
}

/// One remembered measurement: where, and how hot it was then.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestRecord {
    pub position: Vec2,
    pub temperature: f64,
}

/// Per-drone personal bests plus the swarm-wide best, all monotone until
/// reset. Ties keep the incumbent record, which makes sharing deterministic
/// regardless of who measures what first within a tick (updates are applied
/// in drone id order).
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmKnowledge {
    personal: Vec<Option<BestRecord>>,
    swarm: Option<BestRecord>,
}

impl SwarmKnowledge {
    pub fn new(n_drones: usize) -> Self {
        SwarmKnowledge {
            personal: vec![None; n_drones],
            swarm: None,
        }
    }

    pub fn personal_best(&self, drone: usize) -> Option<&BestRecord> {
        self.personal[drone].as_ref()
    }

    pub fn swarm_best(&self) -> Option<&BestRecord> {
        self.swarm.as_ref()
    }

    /// Records a measurement: the personal best is replaced only by a
    /// strictly hotter reading, and the swarm best likewise. The first
    /// measurement ever seeds both.
    pub fn record_and_share(&mut self, drone: usize, position: Vec2, temperature: f64) {
        let record = BestRecord {
            position,
            temperature,
        };
        if self.personal[drone]
            .as_ref()
            .map_or(true, |b| temperature > b.temperature)
        {
            self.personal[drone] = Some(record);
        }
        if self
            .swarm
            .as_ref()
            .map_or(true, |b| temperature > b.temperature)
        {
            self.swarm = Some(record);
        }
    }

    /// Clears all bests; used when the swarm switches to confirming that
    /// the fire is really out, so a rediscovered hot spot wins cleanly.
    pub fn reset(&mut self) {
        self.personal.iter_mut().for_each(|p| *p = None);
        self.swarm = None;
    }
}

/// Everything a single drone's phase update needs to know about the world
/// this tick.
#[derive(Debug, Clone, Copy)]
pub struct WorldView {
    /// No grid cell has been at or above ignition for a full
    /// confirmation window.
    pub fires_believed_out: bool,
    /// This drone has visited all sweep waypoints assigned to it.
    pub sweep_complete: bool,
    /// This drone holds one of the simultaneous landing slots.
    pub landing_granted: bool,
    pub dist_to_own_dock_slot: f64,
}

/// One phase transition per tick, highest-priority demand first.
pub fn update_phase(
    current: MissionPhase,
    res: &DroneResources,
    view: &WorldView,
    params: &MissionParams,
) -> MissionPhase {
    use MissionPhase::*;
    match current {
        Landing if view.dist_to_own_dock_slot <= params.service_radius => Landed,
        Landed if view.fires_believed_out => Landed,
        Recharging if res.battery_level < 1.0 => Recharging,
        WaterCollection
            if res.battery_level >= params.battery_threshold
                && !view.fires_believed_out
                && res.water_level < 1.0 =>
        {
            WaterCollection
        }
        _ => fresh_decision(res, view, params),
    }
}

fn fresh_decision(res: &DroneResources, view: &WorldView, params: &MissionParams) -> MissionPhase {
    use MissionPhase::*;
    if res.battery_level < params.battery_threshold {
        Recharging
    } else if !view.fires_believed_out && res.water_level < params.water_threshold {
        WaterCollection
    } else if view.fires_believed_out {
        if !view.sweep_complete {
            Check
        } else if view.landing_granted {
            Landing
        } else {
            Hovering
        }
    } else {
        Firefighting
    }
}

/// Grants the `slots` landing permits to the candidates closest to the
/// dock; distance ties go to the lower id. Returns granted ids, sorted.
pub fn landing_priority(candidates: &[(usize, Vec2)], dock: Vec2, slots: usize) -> Vec<usize> {
    let mut by_distance: Vec<(f64, usize)> = candidates
        .iter()
        .map(|&(id, pos)| (pos.distance(dock), id))
        .collect();
    by_distance.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    let mut granted: Vec<usize> = by_distance.iter().take(slots).map(|&(_, id)| id).collect();
    granted.sort_unstable();
    granted
}

/// Boustrophedon waypoint plan covering the domain.
///
/// Rows are spaced two sensing radii apart so adjacent passes leave no
/// unseen strip; the same plan serves both the initial fire search and the
/// final check sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub waypoints: Vec<Vec2>,
}

impl SweepPlan {
    pub fn generate(width: f64, height: f64, sensing_radius: f64) -> Self {
        let margin = sensing_radius.min(width / 2.0).min(height / 2.0);
        let xl = margin;
        let xr = (width - margin).max(xl);
        let spacing = 2.0 * sensing_radius;
        let mut waypoints = Vec::new();
        let mut y = margin;
        let mut row = 0usize;
        loop {
            let (a, b) = if row % 2 == 0 { (xl, xr) } else { (xr, xl) };
            waypoints.push(Vec2::new(a, y));
            if xr > xl {
                waypoints.push(Vec2::new(b, y));
            }
            if y + spacing > height - margin {
                break;
            }
            y += spacing;
            row += 1;
        }
        SweepPlan { waypoints }
    }

    /// Waypoints assigned to one drone: every `n_drones`-th, starting at
    /// its id. Collectively the swarm covers the whole plan.
    pub fn assigned_count(&self, drone: usize, n_drones: usize) -> usize {
        (self.waypoints.len() + n_drones - 1 - drone % n_drones) / n_drones
    }

    pub fn assigned_waypoint(&self, drone: usize, n_drones: usize, k: usize) -> Option<Vec2> {
        self.waypoints.get(drone % n_drones + k * n_drones).copied()
    }

    /// Endless serpentine for searching: index wraps around the plan.
    pub fn search_waypoint(&self, cursor: usize) -> Vec2 {
        self.waypoints[cursor % self.waypoints.len()]
    }
}

/// Dock parking grid, one slot per drone, row-major from the dock corner.
pub fn dock_slots(dock: Vec2, n: usize, spacing: f64) -> Vec<Vec2> {
    let per_row = (n as f64).sqrt().ceil() as usize;
    (0..n)
        .map(|i| {
            let ix = i % per_row;
            let iy = i / per_row;
            dock + Vec2::new(ix as f64 * spacing, iy as f64 * spacing)
        })
        .collect()
}

/// Holding positions inside the waiting rectangle, one per drone.
pub fn hover_slots(center: Vec2, size: Vec2, n: usize) -> Vec<Vec2> {
    let per_row = (n as f64).sqrt().ceil() as usize;
    let origin = center - 0.5 * size;
    (0..n)
        .map(|i| {
            let ix = i % per_row;
            let iy = i / per_row;
            origin
                + Vec2::new(
                    (ix as f64 + 0.5) * size.x / per_row as f64,
                    (iy as f64 + 0.5) * size.y / per_row as f64,
                )
        })
        .collect()
}

/// Mission attractor in a phase, plus whether it is a live hot-spot target
/// (only those justify releasing water).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractorChoice {
    pub point: Vec2,
    pub hot_target: bool,
}

pub struct AttractorContext<'a> {
    pub phase: MissionPhase,
    pub drone: usize,
    pub n_drones: usize,
    pub knowledge: &'a SwarmKnowledge,
    pub sweep: &'a SweepPlan,
    pub sweep_cursor: usize,
    pub dock_slot: Vec2,
    pub hover_slot: Vec2,
    pub water_source: Vec2,
    pub hot_threshold: f64,
}

/// Where a drone wants to be this tick.
///
/// Firefighting pulls toward the midpoint of the personal and swarm bests
/// once both are genuinely hot; toward the swarm best alone while the drone
/// has no hot experience of its own; and along the shared search sweep while
/// nobody has found anything burning yet.
pub fn select_attractor(ctx: &AttractorContext) -> AttractorChoice {
    use MissionPhase::*;
    match ctx.phase {
        Firefighting => match ctx.knowledge.swarm_best() {
            Some(sb) if sb.temperature >= ctx.hot_threshold => {
                match ctx.knowledge.personal_best(ctx.drone) {
                    Some(pb) if pb.temperature >= ctx.hot_threshold => AttractorChoice {
                        point: 0.5 * (pb.position + sb.position),
                        hot_target: true,
                    },
                    _ => AttractorChoice {
                        point: sb.position,
                        hot_target: true,
                    },
                }
            }
            _ => AttractorChoice {
                point: ctx.sweep.search_waypoint(ctx.sweep_cursor),
                hot_target: false,
            },
        },
        WaterCollection => AttractorChoice {
            point: ctx.water_source,
            hot_target: false,
        },
        // Each drone recharges on its own dock slot: a shared charging point
        // would leave two simultaneous arrivals repelling each other into a
        // standoff just outside the service radius.
        Recharging => AttractorChoice {
            point: ctx.dock_slot,
            hot_target: false,
        },
        Check => AttractorChoice {
            point: ctx
                .sweep
                .assigned_waypoint(ctx.drone, ctx.n_drones, ctx.sweep_cursor)
                .unwrap_or(ctx.hover_slot),
            hot_target: false,
        },
        Hovering => AttractorChoice {
            point: ctx.hover_slot,
            hot_target: false,
        },
        Landing | Docked | Landed => AttractorChoice {
            point: ctx.dock_slot,
            hot_target: false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> MissionParams {
        MissionParams {
            battery_threshold: 0.2,
            water_threshold: 0.3,
            flight_time: 600.0,
            service_radius: 2.0,
            landing_slots: 6,
            confirmation_window: 5.0,
            pour_quantum: 0.05,
            sensing_radius: 5.0,
            hot_threshold: 550.0,
        }
    }

    fn view() -> WorldView {
        WorldView {
            fires_believed_out: false,
            sweep_complete: false,
            landing_granted: false,
            dist_to_own_dock_slot: 40.0,
        }
    }

    fn res(water: f64, battery: f64) -> DroneResources {
        DroneResources {
            water_level: water,
            battery_level: battery,
        }
    }

    #[test]
    fn low_water_sends_a_firefighter_refilling() {
        let next = update_phase(MissionPhase::Firefighting, &res(0.29, 0.9), &view(), &params());
        assert_eq!(next, MissionPhase::WaterCollection);
    }

    #[test]
    fn water_exactly_at_threshold_keeps_fighting() {
        let next = update_phase(MissionPhase::Firefighting, &res(0.30, 0.9), &view(), &params());
        assert_eq!(next, MissionPhase::Firefighting);
    }

    #[test]
    fn low_battery_preempts_everything_else() {
        for phase in [
            MissionPhase::Firefighting,
            MissionPhase::WaterCollection,
            MissionPhase::Check,
            MissionPhase::Hovering,
        ] {
            let next = update_phase(phase, &res(0.1, 0.19), &view(), &params());
            assert_eq!(next, MissionPhase::Recharging, "from {phase:?}");
        }
    }

    #[test]
    fn recharging_persists_until_full_then_resumes() {
        let partial = update_phase(MissionPhase::Recharging, &res(1.0, 0.7), &view(), &params());
        assert_eq!(partial, MissionPhase::Recharging);
        let full = update_phase(MissionPhase::Recharging, &res(1.0, 1.0), &view(), &params());
        assert_eq!(full, MissionPhase::Firefighting);
    }

    #[test]
    fn refilling_persists_until_full() {
        let next = update_phase(MissionPhase::WaterCollection, &res(0.6, 0.9), &view(), &params());
        assert_eq!(next, MissionPhase::WaterCollection);
        let next = update_phase(MissionPhase::WaterCollection, &res(1.0, 0.9), &view(), &params());
        assert_eq!(next, MissionPhase::Firefighting);
    }

    #[test]
    fn quiet_grid_drives_check_then_landing_or_hovering() {
        let mut v = view();
        v.fires_believed_out = true;
        let p = params();
        let busy = res(0.0, 0.9);
        assert_eq!(
            update_phase(MissionPhase::Firefighting, &busy, &v, &p),
            MissionPhase::Check,
            "empty tank must not matter once nothing burns"
        );
        v.sweep_complete = true;
        assert_eq!(
            update_phase(MissionPhase::Check, &busy, &v, &p),
            MissionPhase::Hovering
        );
        v.landing_granted = true;
        assert_eq!(
            update_phase(MissionPhase::Hovering, &busy, &v, &p),
            MissionPhase::Landing
        );
    }

    #[test]
    fn landing_drone_touches_down_within_the_service_radius() {
        let mut v = view();
        v.fires_believed_out = true;
        v.sweep_complete = true;
        v.landing_granted = true;
        v.dist_to_own_dock_slot = 1.9;
        let next = update_phase(MissionPhase::Landing, &res(0.5, 0.9), &v, &params());
        assert_eq!(next, MissionPhase::Landed);
    }

    #[test]
    fn landed_drones_stay_down_while_the_grid_is_quiet() {
        let mut v = view();
        v.fires_believed_out = true;
        let next = update_phase(MissionPhase::Landed, &res(1.0, 1.0), &v, &params());
        assert_eq!(next, MissionPhase::Landed);
    }

    #[test]
    fn landed_drones_relaunch_when_fire_reappears() {
        let next = update_phase(MissionPhase::Landed, &res(1.0, 1.0), &view(), &params());
        assert_eq!(next, MissionPhase::Firefighting);
    }

    #[test]
    fn docked_swarm_with_nothing_burning_goes_checking() {
        let mut v = view();
        v.fires_believed_out = true;
        let next = update_phase(MissionPhase::Docked, &res(0.0, 1.0), &v, &params());
        assert_eq!(next, MissionPhase::Check);
    }

    #[test]
    fn docked_swarm_with_a_fire_and_no_water_fetches_water_first() {
        let next = update_phase(MissionPhase::Docked, &res(0.0, 1.0), &view(), &params());
        assert_eq!(next, MissionPhase::WaterCollection);
    }

    #[test]
    fn first_measurement_seeds_both_bests() {
        let mut k = SwarmKnowledge::new(3);
        k.record_and_share(1, Vec2::new(4.0, 5.0), 320.0);
        assert_eq!(k.personal_best(1).unwrap().temperature, 320.0);
        assert_eq!(k.swarm_best().unwrap().temperature, 320.0);
        assert_eq!(k.personal_best(0), None);
    }

    #[test]
    fn hotter_measurement_replaces_both_bests() {
        let mut k = SwarmKnowledge::new(2);
        k.record_and_share(0, Vec2::new(1.0, 1.0), 400.0);
        k.record_and_share(0, Vec2::new(2.0, 2.0), 900.0);
        assert_eq!(k.personal_best(0).unwrap().position, Vec2::new(2.0, 2.0));
        assert_eq!(k.swarm_best().unwrap().position, Vec2::new(2.0, 2.0));
    }

    #[test]
    fn equal_temperature_keeps_the_incumbent() {
        let mut k = SwarmKnowledge::new(2);
        k.record_and_share(0, Vec2::new(1.0, 1.0), 700.0);
        k.record_and_share(1, Vec2::new(9.0, 9.0), 700.0);
        assert_eq!(k.swarm_best().unwrap().position, Vec2::new(1.0, 1.0));
        assert_eq!(k.personal_best(1).unwrap().position, Vec2::new(9.0, 9.0));
    }

    #[test]
    fn cooler_measurement_changes_nothing() {
        let mut k = SwarmKnowledge::new(1);
        k.record_and_share(0, Vec2::new(1.0, 1.0), 700.0);
        k.record_and_share(0, Vec2::new(3.0, 3.0), 500.0);
        assert_eq!(k.personal_best(0).unwrap().position, Vec2::new(1.0, 1.0));
    }

    #[test]
    fn firefighting_attractor_is_the_midpoint_of_both_bests() {
        let mut k = SwarmKnowledge::new(2);
        k.record_and_share(0, Vec2::new(10.0, 0.0), 800.0);
        k.record_and_share(1, Vec2::new(0.0, 10.0), 900.0);
        let sweep = SweepPlan::generate(50.0, 50.0, 5.0);
        let choice = select_attractor(&AttractorContext {
            phase: MissionPhase::Firefighting,
            drone: 0,
            n_drones: 2,
            knowledge: &k,
            sweep: &sweep,
            sweep_cursor: 0,
            dock_slot: Vec2::ZERO,
            hover_slot: Vec2::ZERO,
            water_source: Vec2::ZERO,
            hot_threshold: 550.0,
        });
        assert_eq!(choice.point, Vec2::new(5.0, 5.0));
        assert!(choice.hot_target);
    }

    #[test]
    fn firefighter_without_hot_experience_heads_for_the_swarm_best() {
        let mut k = SwarmKnowledge::new(2);
        k.record_and_share(0, Vec2::new(2.0, 2.0), 310.0);
        k.record_and_share(1, Vec2::new(30.0, 40.0), 1100.0);
        let sweep = SweepPlan::generate(50.0, 50.0, 5.0);
        let choice = select_attractor(&AttractorContext {
            phase: MissionPhase::Firefighting,
            drone: 0,
            n_drones: 2,
            knowledge: &k,
            sweep: &sweep,
            sweep_cursor: 3,
            dock_slot: Vec2::ZERO,
            hover_slot: Vec2::ZERO,
            water_source: Vec2::ZERO,
            hot_threshold: 550.0,
        });
        assert_eq!(choice.point, Vec2::new(30.0, 40.0));
        assert!(choice.hot_target);
    }

    #[test]
    fn firefighter_with_no_discovery_follows_the_search_sweep() {
        let k = SwarmKnowledge::new(1);
        let sweep = SweepPlan::generate(50.0, 50.0, 5.0);
        let choice = select_attractor(&AttractorContext {
            phase: MissionPhase::Firefighting,
            drone: 0,
            n_drones: 1,
            knowledge: &k,
            sweep: &sweep,
            sweep_cursor: 1,
            dock_slot: Vec2::ZERO,
            hover_slot: Vec2::ZERO,
            water_source: Vec2::ZERO,
            hot_threshold: 550.0,
        });
        assert_eq!(choice.point, sweep.waypoints[1]);
        assert!(!choice.hot_target);
    }

    #[test]
    fn two_landing_slots_go_to_the_two_nearest() {
        let dock = Vec2::ZERO;
        let candidates = vec![
            (0, Vec2::new(4.0, 0.0)),
            (1, Vec2::new(1.0, 0.0)),
            (2, Vec2::new(3.0, 0.0)),
            (3, Vec2::new(2.0, 0.0)),
        ];
        assert_eq!(landing_priority(&candidates, dock, 2), vec![1, 3]);
    }

    #[test]
    fn landing_ties_break_toward_the_lower_id() {
        let dock = Vec2::ZERO;
        let candidates = vec![
            (7, Vec2::new(0.0, 2.0)),
            (3, Vec2::new(2.0, 0.0)),
            (5, Vec2::new(-2.0, 0.0)),
        ];
        assert_eq!(landing_priority(&candidates, dock, 2), vec![3, 5]);
    }

    #[test]
    fn sweep_rows_leave_no_unseen_strip() {
        let plan = SweepPlan::generate(50.0, 50.0, 5.0);
        let rows: Vec<f64> = plan.waypoints.iter().map(|w| w.y).collect();
        for y in 0..=50 {
            let y = y as f64;
            assert!(
                rows.iter().any(|&r| (r - y).abs() <= 5.0),
                "y = {y} not covered"
            );
        }
        // Serpentine: consecutive waypoints share a row or a column.
        for pair in plan.waypoints.windows(2) {
            assert!(pair[0].x == pair[1].x || pair[0].y == pair[1].y);
        }
    }

    #[test]
    fn sweep_assignment_partitions_the_plan() {
        let plan = SweepPlan::generate(50.0, 50.0, 5.0);
        let n = 3;
        let mut seen = vec![0usize; plan.waypoints.len()];
        for drone in 0..n {
            for k in 0..plan.assigned_count(drone, n) {
                let wp = plan.assigned_waypoint(drone, n, k).unwrap();
                let idx = plan.waypoints.iter().position(|&w| w == wp).unwrap();
                seen[idx] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn dock_slots_are_distinct_and_anchored_at_the_dock() {
        let slots = dock_slots(Vec2::new(4.0, 4.0), 20, 1.5);
        assert_eq!(slots.len(), 20);
        assert_eq!(slots[0], Vec2::new(4.0, 4.0));
        for i in 0..slots.len() {
            for j in (i + 1)..slots.len() {
                assert!(slots[i].distance(slots[j]) >= 1.5 - 1e-9);
            }
        }
    }

    #[test]
    fn hover_slots_stay_inside_the_waiting_rectangle() {
        let center = Vec2::new(25.0, 25.0);
        let size = Vec2::new(12.0, 12.0);
        for slot in hover_slots(center, size, 20) {
            assert!((slot.x - center.x).abs() <= 6.0);
            assert!((slot.y - center.y).abs() <= 6.0);
        }
    }

    proptest! {
        #[test]
        fn swarm_best_dominates_every_personal_best(
            measurements in proptest::collection::vec(
                (0..5usize, -20.0..20.0f64, -20.0..20.0f64, 280.0..1200.0f64),
                1..50,
            ),
        ) {
            let mut k = SwarmKnowledge::new(5);
            for &(d, x, y, t) in &measurements {
                k.record_and_share(d, Vec2::new(x, y), t);
            }
            let sb = k.swarm_best().unwrap().temperature;
            for d in 0..5 {
                if let Some(pb) = k.personal_best(d) {
                    prop_assert!(sb >= pb.temperature);
                }
            }
        }

        #[test]
        fn swarm_best_is_monotone_until_reset(
            temps in proptest::collection::vec(280.0..1200.0f64, 1..40),
        ) {
            let mut k = SwarmKnowledge::new(1);
            let mut prev = f64::NEG_INFINITY;
            for (i, &t) in temps.iter().enumerate() {
                k.record_and_share(0, Vec2::new(i as f64, 0.0), t);
                let sb = k.swarm_best().unwrap().temperature;
                prop_assert!(sb >= prev);
                prev = sb;
            }
            k.reset();
            prop_assert!(k.swarm_best().is_none());
        }
    }
}

//! Assignment-space optimization.
//!
//! The outer decision is a binary matrix assigning customer ports to ships.
//! [`evaluate_assignment`] prices one assignment by solving the ships in index
//! order against the demands left over from earlier ships, chartering any ship
//! whose serving profit does not beat its charter revenue. [`refine`] drops
//! visited ports with no service and no bunkering and re-optimizes, which
//! under the triangle inequality never lowers profit. On top of these,
//! [`neighborhood_search`] runs first-improvement local search and
//! [`mpas_search`] runs the adaptive most-promising-area random search.

pub mod mpas;
pub mod neighborhood;

pub use mpas::{mpa_contains, mpas_search, sample_mpa, MpasParams};
pub use neighborhood::{is_local_optimum, neighborhood_search, NsParams};

use crate::model::{Assignment, FleetPlan, Instance, ModelError, ShipPlan};
use crate::singleship::{
    rebuild_with_true_fuel, solve_single_ship, SingleShipOutcome, SingleShipTask, SolverConfig,
};
use crate::verify::evaluate_fleet_plan;
use crate::FEAS_TOL;
use std::collections::HashMap;
use std::time::Instant;

/// One evaluation appended to the trace log (CSV in the harness).
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub iteration: u64,
    pub bits: String,
    pub h: f64,
    pub refined: bool,
    /// Wall-clock seconds since the run started; informational only.
    pub wall_secs: f64,
}

/// Outcome of a search driver run.
#[derive(Debug, Clone)]
pub struct SearchRun {
    pub best_bits: Assignment,
    pub best_h: f64,
    pub best_plan: FleetPlan,
    pub iterations: u64,
    /// Fresh assignment evaluations performed by this run (cache misses).
    pub evaluations: u64,
    pub trace: Vec<TraceRecord>,
    /// Times the region sampler fell back to radius-stratified draws.
    pub degraded_sampler_events: u64,
    /// Sampled points that failed the region-membership check (always 0).
    pub region_violations: u64,
}

fn shape_check(inst: &Instance, y: &Assignment) -> Result<(), ModelError> {
    if y.num_ships() != inst.num_ships() || y.num_customers() != inst.num_customers() {
        return Err(ModelError::Shape(format!(
            "assignment {}x{} against instance with {} ships and {} customers",
            y.num_ships(),
            y.num_customers(),
            inst.num_ships(),
            inst.num_customers()
        )));
    }
    Ok(())
}

/// Price an assignment: ships are processed in ascending index order, each
/// solving its single-ship problem against the demands still unserved, and a
/// ship whose serving profit does not exceed its charter revenue is chartered
/// (its service is discarded and demands stay available to later ships).
/// Ships with more assigned ports than the planner cap, or with no feasible
/// visit order, are chartered as well.
///
/// Returns the fleet profit `h` and the assembled plan. Pure; memoization
/// lives in [`SearchState`].
pub fn evaluate_assignment(
    inst: &Instance,
    y: &Assignment,
    cfg: &SolverConfig,
) -> Result<(f64, FleetPlan), ModelError> {
    shape_check(inst, y)?;
    let customers = inst.num_customers();
    let mut rem_del: Vec<f64> = (0..customers).map(|c| inst.port(c + 1).delivery_demand).collect();
    let mut rem_pick: Vec<f64> = (0..customers).map(|c| inst.port(c + 1).pickup_demand).collect();

    let mut plans = Vec::with_capacity(inst.num_ships());
    let mut profits = Vec::with_capacity(inst.num_ships());
    for k in 0..inst.num_ships() {
        let ports = y.ports_of_ship(k);
        let charter = |plans: &mut Vec<ShipPlan>, profits: &mut Vec<f64>| {
            plans.push(ShipPlan::charter());
            profits.push(inst.ship(k).charter_revenue);
        };
        if ports.is_empty() || ports.len() > cfg.max_assigned_ports {
            charter(&mut plans, &mut profits);
            continue;
        }
        let del: Vec<f64> = ports.iter().map(|&p| rem_del[p - 1]).collect();
        let pick: Vec<f64> = ports.iter().map(|&p| rem_pick[p - 1]).collect();
        let task = SingleShipTask::new(inst, k, ports, del, pick)?;
        match solve_single_ship(&task, cfg)? {
            SingleShipOutcome::Solved(sol) if sol.serving_profit > inst.ship(k).charter_revenue => {
                for v in &sol.plan.visits {
                    if v.port != 0 {
                        rem_del[v.port - 1] = (rem_del[v.port - 1] - v.delivery).max(0.0);
                        rem_pick[v.port - 1] = (rem_pick[v.port - 1] - v.pickup).max(0.0);
                    }
                }
                profits.push(sol.serving_profit);
                plans.push(sol.plan);
            }
            _ => charter(&mut plans, &mut profits),
        }
    }
    let total: f64 = profits.iter().sum();
    Ok((total, FleetPlan { plans, per_ship_profit: profits, total_profit: total }))
}

/// Outcome of a refinement pass.
#[derive(Debug, Clone)]
pub struct RefineOutcome {
    pub bits: Assignment,
    pub plan: FleetPlan,
    pub h: f64,
    pub changed: bool,
}

/// Ports visited by a sailing ship with zero delivery, zero pickup and zero
/// bunkering, per ship.
fn no_op_ports(plan: &FleetPlan) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    for (k, sp) in plan.plans.iter().enumerate() {
        if sp.chartered {
            continue;
        }
        let dead: Vec<usize> = sp
            .visits
            .iter()
            .filter(|v| {
                v.port != 0
                    && v.delivery.abs() <= FEAS_TOL
                    && v.pickup.abs() <= FEAS_TOL
                    && v.bunker_amount.abs() <= FEAS_TOL
            })
            .map(|v| v.port)
            .collect();
        if !dead.is_empty() {
            out.push((k, dead));
        }
    }
    out
}

/// Splice dead ports out of one ship's existing plan, keeping its quantities
/// and arrival pattern: merged legs inherit the removed legs' combined sailing
/// time (clamped to the speed box) and bunkering is re-solved exactly for the
/// shorter cycle.
fn splice_ship(inst: &Instance, ship_idx: usize, sp: &ShipPlan, dead: &[usize]) -> Option<(ShipPlan, f64)> {
    let ship = inst.ship(ship_idx);
    let mut seq = Vec::new();
    let mut del = Vec::new();
    let mut pick = Vec::new();
    let mut speeds = Vec::new();
    let mut pending_time = 0.0;
    let mut from = 0usize;
    for (i, v) in sp.visits.iter().enumerate().skip(1) {
        let leg = &sp.legs[i - 1];
        let d = inst.distance(leg.from, leg.to);
        pending_time += if d > 0.0 { d / leg.speed } else { 0.0 };
        if v.port != 0 && dead.contains(&v.port) {
            continue;
        }
        let merged = inst.distance(from, v.port);
        let time = if merged > 0.0 {
            pending_time.min(merged / ship.speed_min).max(merged / ship.speed_max)
        } else {
            0.0
        };
        let speed = if merged > 0.0 { merged / time } else { ship.speed_min };
        speeds.push(speed);
        if v.port != 0 {
            seq.push(v.port);
            del.push(v.delivery);
            pick.push(v.pickup);
        }
        pending_time = 0.0;
        from = v.port;
    }
    if seq.is_empty() {
        return None;
    }
    rebuild_with_true_fuel(inst, ship_idx, &seq, &del, &pick, &speeds)
}

/// Drop no-op ports (visited with zero service and zero bunkering) from the
/// assignment and re-optimize, iterating until none remain. The audited
/// profit of the result never drops below the input plan's: a full
/// re-evaluation of the reduced assignment is tried first, and if the
/// sequential chain happens to land lower, the dead legs are spliced out of
/// the existing plan instead, which shortens distances without touching any
/// other ship.
pub fn refine(
    inst: &Instance,
    plan: &FleetPlan,
    y: &Assignment,
    cfg: &SolverConfig,
) -> Result<RefineOutcome, ModelError> {
    shape_check(inst, y)?;
    let mut cur_bits = y.clone();
    let mut cur_plan = plan.clone();
    let mut cur_h = plan.total_profit;
    let mut changed = false;

    for _ in 0..=y.num_bits() {
        let dead = no_op_ports(&cur_plan);
        if dead.is_empty() {
            break;
        }
        let mut next_bits = cur_bits.clone();
        for (k, ports) in &dead {
            for &p in ports {
                next_bits.set(*k, p - 1, false);
            }
        }
        // Route 1: full sequential re-evaluation of the reduced assignment.
        let (h_full, plan_full) = evaluate_assignment(inst, &next_bits, cfg)?;
        if h_full >= cur_h - 1e-9 {
            cur_bits = next_bits;
            cur_plan = plan_full;
            cur_h = h_full;
            changed = true;
            continue;
        }
        // Route 2: splice the dead legs out of the current plan, leaving
        // every other ship untouched.
        let mut patched = cur_plan.clone();
        let mut ok = true;
        for (k, ports) in &dead {
            match splice_ship(inst, *k, &cur_plan.plans[*k], ports) {
                Some((sp, serving)) => {
                    patched.plans[*k] = sp;
                    patched.per_ship_profit[*k] = serving;
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            patched.total_profit = patched.per_ship_profit.iter().sum();
            let audit = evaluate_fleet_plan(inst, &patched)?;
            if audit.is_clean() && audit.total_profit >= cur_h - 1e-9 {
                cur_bits = next_bits;
                cur_h = audit.total_profit;
                cur_plan = patched;
                changed = true;
                continue;
            }
        }
        // Dropping would lose profit through the demand chain; keep the plan.
        break;
    }
    Ok(RefineOutcome { bits: cur_bits, plan: cur_plan, h: cur_h, changed })
}

/// One cached evaluation.
#[derive(Debug, Clone)]
pub struct StateEntry {
    pub bits: Assignment,
    pub h: f64,
    pub plan: FleetPlan,
    /// Entry index of the refined twin, when refinement changed the assignment.
    pub refined_to: Option<usize>,
}

/// Monotone evaluation cache shared by the search drivers: every visited
/// assignment with its value, in evaluation order. Entries are never evicted,
/// and the incumbent is the highest-value entry with ties broken toward the
/// earlier evaluation.
#[derive(Debug, Default)]
pub struct SearchState {
    entries: Vec<StateEntry>,
    index: HashMap<Assignment, usize>,
    incumbent: Option<usize>,
    /// Fresh sequential-chain evaluations (cache misses).
    pub raw_evaluations: u64,
}

impl SearchState {
    pub fn new() -> Self {
        SearchState::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[StateEntry] {
        &self.entries
    }

    pub fn get_index(&self, y: &Assignment) -> Option<usize> {
        self.index.get(y).copied()
    }

    pub fn incumbent(&self) -> Option<&StateEntry> {
        self.incumbent.map(|i| &self.entries[i])
    }

    fn consider(&mut self, idx: usize) {
        match self.incumbent {
            None => self.incumbent = Some(idx),
            Some(cur) => {
                if self.entries[idx].h > self.entries[cur].h {
                    self.incumbent = Some(idx);
                }
            }
        }
    }

    /// Insert an already-evaluated assignment, e.g. to warm-start a run or to
    /// build hand-crafted visited sets in tests.
    pub fn insert_evaluated(&mut self, bits: Assignment, h: f64, plan: FleetPlan) -> usize {
        self.record(bits, h, plan, None)
    }

    /// Insert a record, or raise an existing record's value when the new one
    /// is better. Returns the entry index.
    fn record(&mut self, bits: Assignment, h: f64, plan: FleetPlan, refined_to: Option<usize>) -> usize {
        if let Some(&i) = self.index.get(&bits) {
            if h > self.entries[i].h {
                self.entries[i].h = h;
                self.entries[i].plan = plan;
            }
            if self.entries[i].refined_to.is_none() {
                self.entries[i].refined_to = refined_to;
            }
            self.consider(i);
            return i;
        }
        let i = self.entries.len();
        self.index.insert(bits.clone(), i);
        self.entries.push(StateEntry { bits, h, plan, refined_to });
        self.consider(i);
        i
    }
}

/// Result of pushing one assignment through chain evaluation plus refinement.
#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub bits: Assignment,
    pub h: f64,
    pub plan: FleetPlan,
    pub refined: Option<RefineOutcome>,
}

/// Pure evaluation pipeline: sequential chain, then the refinement pass.
pub fn evaluate_pipeline(
    inst: &Instance,
    y: &Assignment,
    cfg: &SolverConfig,
) -> Result<PipelineResult, ModelError> {
    let (h, plan) = evaluate_assignment(inst, y, cfg)?;
    let refined = refine(inst, &plan, y, cfg)?;
    let refined = if refined.changed { Some(refined) } else { None };
    Ok(PipelineResult { bits: y.clone(), h, plan, refined })
}

/// Store a pipeline result in the state; returns the index of the best entry
/// (the refined twin when refinement improved the assignment).
pub fn commit_pipeline(state: &mut SearchState, result: PipelineResult) -> usize {
    state.raw_evaluations += 1;
    match result.refined {
        None => state.record(result.bits, result.h, result.plan, None),
        Some(r) => {
            let refined_idx = state.record(r.bits, r.h, r.plan, None);
            let raw_idx = state.record(result.bits, result.h, result.plan, Some(refined_idx));
            if state.entries[refined_idx].h >= state.entries[raw_idx].h {
                refined_idx
            } else {
                raw_idx
            }
        }
    }
}

/// Cached evaluate-and-refine: returns the index of the entry holding the
/// assignment's value (following the refined twin when it is better).
pub fn evaluate_cached(
    inst: &Instance,
    y: &Assignment,
    cfg: &SolverConfig,
    state: &mut SearchState,
) -> Result<usize, ModelError> {
    if let Some(i) = state.get_index(y) {
        let e = &state.entries[i];
        if let Some(t) = e.refined_to {
            if state.entries[t].h > e.h {
                return Ok(t);
            }
        }
        return Ok(i);
    }
    let result = evaluate_pipeline(inst, y, cfg)?;
    Ok(commit_pipeline(state, result))
}

pub(crate) fn elapsed_secs(start: Instant) -> f64 {
    start.elapsed().as_secs_f64()
}

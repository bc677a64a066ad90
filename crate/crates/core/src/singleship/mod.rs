//! Optimal (to tolerance) planning for one ship forced to visit a given set
//! of customer ports: visit order, per-leg cruise speed, pickup and delivery
//! quantities, bunkering ports and volumes.
//!
//! Routes are enumerated exhaustively with earliest-arrival prefix pruning;
//! each surviving sequence is refined by block-coordinate descent alternating
//! an exact speed step (convex, [`speed`]), an exact quantity step (linear
//! program over the cargo polytope) and an exact bunkering step ([`bunker`]).
//! Every block update is audited and only kept when it does not lower the
//! sequence profit, so the inner profit sequence is non-decreasing.

pub mod bunker;
pub mod speed;

use crate::model::{Instance, Leg, ModelError, ShipPlan, Visit};
use crate::par;
use crate::simplex::{self, LinearProgram};
use bunker::{solve_bunkering, BunkerProblem, BunkerSolution};
use speed::{optimize_leg_times, SpeedLeg, TimeBounds};

/// How the fuel-rate law sees displacement during optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightModel {
    /// Displacement varies leg by leg with the cargo actually on board.
    PerLeg,
    /// Displacement frozen at the depot-departure value of the current
    /// iterate; the weight-ignoring ablation.
    FrozenAtDeparture,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Largest assigned-port set the planner accepts.
    pub max_assigned_ports: usize,
    /// Cap on coordinate-descent rounds per sequence.
    pub max_rounds: usize,
    /// Relative profit improvement below which the inner loop stops.
    pub rel_tol: f64,
    pub weight_model: WeightModel,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_assigned_ports: 9,
            max_rounds: 50,
            rel_tol: 1e-6,
            weight_model: WeightModel::PerLeg,
        }
    }
}

/// One ship, its assigned customer ports, and the demand still unserved at
/// each after earlier ships in the evaluation order took their share.
#[derive(Debug, Clone)]
pub struct SingleShipTask<'a> {
    pub inst: &'a Instance,
    /// 0-based ship index.
    pub ship: usize,
    /// Assigned customer port indices, ascending; never contains the depot.
    pub ports: Vec<usize>,
    /// Remaining delivery demand per assigned port, TEU.
    pub remaining_delivery: Vec<f64>,
    /// Remaining pickup demand per assigned port, TEU.
    pub remaining_pickup: Vec<f64>,
}

impl<'a> SingleShipTask<'a> {
    pub fn new(
        inst: &'a Instance,
        ship: usize,
        ports: Vec<usize>,
        remaining_delivery: Vec<f64>,
        remaining_pickup: Vec<f64>,
    ) -> Result<Self, ModelError> {
        if ship >= inst.num_ships() {
            return Err(ModelError::Shape(format!("ship index {ship} out of range")));
        }
        if ports.len() != remaining_delivery.len() || ports.len() != remaining_pickup.len() {
            return Err(ModelError::Shape("remaining demand vectors must match the port list".into()));
        }
        let mut prev = 0;
        for (i, &p) in ports.iter().enumerate() {
            if p == 0 || p >= inst.num_ports() {
                return Err(ModelError::Shape(format!("assigned port index {p} invalid")));
            }
            if i > 0 && p <= prev {
                return Err(ModelError::Invalid("assigned ports must be strictly ascending".into()));
            }
            prev = p;
            let port = inst.port(p);
            if remaining_delivery[i] > port.delivery_demand + 1e-9
                || remaining_pickup[i] > port.pickup_demand + 1e-9
                || remaining_delivery[i] < 0.0
                || remaining_pickup[i] < 0.0
            {
                return Err(ModelError::Invalid(format!(
                    "remaining demand at port {} outside [0, original demand]",
                    port.id
                )));
            }
        }
        Ok(SingleShipTask { inst, ship, ports, remaining_delivery, remaining_pickup })
    }

    /// Task against the full (undiminished) port demands.
    pub fn with_full_demands(inst: &'a Instance, ship: usize, ports: Vec<usize>) -> Result<Self, ModelError> {
        let del = ports.iter().map(|&p| inst.port(p).delivery_demand).collect();
        let pick = ports.iter().map(|&p| inst.port(p).pickup_demand).collect();
        SingleShipTask::new(inst, ship, ports, del, pick)
    }
}

/// Solver effort counters, summed across parallel workers.
#[derive(Debug, Clone, Copy, Default)]
pub struct Diagnostics {
    pub sequences_enumerated: u64,
    pub sequences_feasible: u64,
    pub inner_rounds: u64,
    pub bunker_solves: u64,
}

#[derive(Debug, Clone)]
pub struct SingleShipSolution {
    pub plan: ShipPlan,
    /// Revenue minus fuel cost; excludes the charter comparison.
    pub serving_profit: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone)]
pub enum SingleShipOutcome {
    Solved(SingleShipSolution),
    /// No visit order is feasible; the caller treats the ship as a charter candidate.
    Infeasible(Diagnostics),
}

/// Enumerate every visit order of the assigned ports that is not provably
/// infeasible: prefixes are pruned when even sailing flat out (maximum speed,
/// counting processing times) misses a port deadline, or when the direct
/// return from the prefix would already miss the cycle deadline.
/// Sequences come out in lexicographic port-index order.
pub fn enumerate_routes(task: &SingleShipTask) -> Vec<Vec<usize>> {
    let inst = task.inst;
    let ship = inst.ship(task.ship);
    let vmax = ship.speed_max;
    let n = task.ports.len();
    let mut out = Vec::new();
    let mut used = vec![false; n];
    let mut seq = Vec::with_capacity(n);

    fn dfs(
        inst: &Instance,
        ports: &[usize],
        vmax: f64,
        deadline: f64,
        used: &mut Vec<bool>,
        seq: &mut Vec<usize>,
        cur_port: usize,
        cur_time: f64,
        out: &mut Vec<Vec<usize>>,
    ) {
        if seq.len() == ports.len() {
            out.push(seq.clone());
            return;
        }
        let depart = cur_time + inst.port(cur_port).processing_time;
        for i in 0..ports.len() {
            if used[i] {
                continue;
            }
            let next = ports[i];
            let arrival = depart + inst.distance(cur_port, next) / vmax;
            if arrival > inst.port(next).window_close + 1e-9 {
                continue;
            }
            // Direct return from the extended prefix.
            let back = arrival
                + inst.port(next).processing_time
                + inst.distance(next, 0) / vmax;
            if back > deadline + 1e-9 {
                continue;
            }
            used[i] = true;
            seq.push(next);
            dfs(inst, ports, vmax, deadline, used, seq, next, arrival, out);
            seq.pop();
            used[i] = false;
        }
    }

    dfs(inst, &task.ports, vmax, ship.cycle_deadline, &mut used, &mut seq, 0, 0.0, &mut out);
    out
}

/// Fixed-sequence context shared by the inner-loop steps.
struct SeqCtx<'a> {
    task: &'a SingleShipTask<'a>,
    /// Visit order as customer port indices.
    seq: &'a [usize],
    /// Leg distances; leg `l` leaves position `l` (position 0 = depot).
    dists: Vec<f64>,
    /// Remaining demand per sequence position (1-based positions 1..=m).
    rem_del: Vec<f64>,
    rem_pick: Vec<f64>,
    /// Sailing-time box per leg.
    t_min: Vec<f64>,
    t_max: Vec<f64>,
    /// Cumulative sailing-time window after each leg.
    checkpoints: Vec<TimeBounds>,
    /// Cheapest unit fuel price among visited ports (marginal price proxy).
    fuel_value: f64,
    cargo_cap: f64,
}

impl<'a> SeqCtx<'a> {
    fn new(task: &'a SingleShipTask<'a>, seq: &'a [usize]) -> Self {
        let inst = task.inst;
        let ship = inst.ship(task.ship);
        let m = seq.len();
        let mut dists = Vec::with_capacity(m + 1);
        let mut prev = 0usize;
        for &p in seq {
            dists.push(inst.distance(prev, p));
            prev = p;
        }
        dists.push(inst.distance(prev, 0));

        let by_port = |p: usize| task.ports.iter().position(|&q| q == p).unwrap();
        let rem_del: Vec<f64> = seq.iter().map(|&p| task.remaining_delivery[by_port(p)]).collect();
        let rem_pick: Vec<f64> = seq.iter().map(|&p| task.remaining_pickup[by_port(p)]).collect();

        let t_min: Vec<f64> = dists.iter().map(|d| d / ship.speed_max).collect();
        let t_max: Vec<f64> = dists.iter().map(|d| d / ship.speed_min).collect();

        // Checkpoint after leg l: arrival at position l+1 minus accumulated
        // processing times; the final checkpoint carries the cycle deadline.
        let mut checkpoints = Vec::with_capacity(m + 1);
        let mut proc = inst.port(0).processing_time;
        for &p in seq {
            let port = inst.port(p);
            checkpoints.push(TimeBounds { lower: port.window_open - proc, upper: port.window_close - proc });
            proc += port.processing_time;
        }
        checkpoints.push(TimeBounds { lower: f64::NEG_INFINITY, upper: ship.cycle_deadline - proc });

        let fuel_value = std::iter::once(0usize)
            .chain(seq.iter().copied())
            .map(|p| inst.port(p).prices.cheapest_price())
            .fold(f64::INFINITY, f64::min);

        let cargo_cap = ship.cargo_capacity(inst.cargo_unit_weight());
        SeqCtx { task, seq, dists, rem_del, rem_pick, t_min, t_max, checkpoints, fuel_value, cargo_cap }
    }

    fn ship(&self) -> &crate::model::Ship {
        self.task.inst.ship(self.task.ship)
    }

    fn positions(&self) -> usize {
        self.seq.len() + 1
    }

    /// Cargo on board during each leg for the given quantities.
    fn onboard(&self, del: &[f64], pick: &[f64]) -> Vec<f64> {
        let m = self.seq.len();
        let mut out = Vec::with_capacity(m + 1);
        for l in 0..=m {
            let mut on = 0.0;
            for i in 1..=m {
                if i > l {
                    on += del[i - 1];
                } else {
                    on += pick[i - 1];
                }
            }
            out.push(on);
        }
        out
    }

    /// Displacement on each leg under the configured weight model.
    fn leg_weights(&self, del: &[f64], pick: &[f64], model: WeightModel) -> Vec<f64> {
        let w0 = self.ship().lightweight;
        let w = self.task.inst.cargo_unit_weight();
        match model {
            WeightModel::PerLeg => self.onboard(del, pick).iter().map(|on| w0 + w * on).collect(),
            WeightModel::FrozenAtDeparture => {
                let departure = w0 + w * del.iter().sum::<f64>();
                vec![departure; self.seq.len() + 1]
            }
        }
    }

    /// Fuel burned per leg, tons.
    fn burns(&self, times: &[f64], del: &[f64], pick: &[f64], model: WeightModel) -> Vec<f64> {
        let c = self.ship().consumption_const;
        self.leg_weights(del, pick, model)
            .iter()
            .zip(&self.dists)
            .zip(times)
            .map(|((wt, &d), &t)| if d > 0.0 && t > 0.0 { c * wt * d * d * d / (t * t) } else { 0.0 })
            .collect()
    }

    fn revenue(&self, del: &[f64], pick: &[f64]) -> f64 {
        self.seq
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let port = self.task.inst.port(p);
                port.delivery_revenue * del[i] + port.pickup_revenue * pick[i]
            })
            .sum()
    }

    fn speed_legs(&self, weights: &[f64]) -> Vec<SpeedLeg> {
        self.dists
            .iter()
            .zip(weights)
            .zip(self.t_min.iter().zip(&self.t_max))
            .map(|((&d, &wt), (&lo, &hi))| SpeedLeg { time_min: lo, time_max: hi, cost_coeff: wt * d * d * d })
            .collect()
    }

    fn bunker_problem(&self, burns: Vec<f64>) -> BunkerProblem<'_> {
        let inst = self.task.inst;
        let ship = self.ship();
        let mut prices = Vec::with_capacity(self.positions());
        prices.push(&inst.port(0).prices);
        for &p in self.seq {
            prices.push(&inst.port(p).prices);
        }
        BunkerProblem {
            prices,
            burns,
            capacity: ship.fuel_capacity,
            safety: ship.safety_fuel(),
            min_batch: ship.min_bunker(),
        }
    }
}

struct SeqSolution {
    times: Vec<f64>,
    del: Vec<f64>,
    pick: Vec<f64>,
    bunker: BunkerSolution,
    profit: f64,
    rounds: u64,
    bunker_solves: u64,
}

/// Quantity step: with leg times fixed, fuel burned on a leg is linear in the
/// cargo on board, so each unit of cargo has a computable net marginal value
/// (revenue minus marginal-priced fuel). Solve the resulting LP exactly over
/// the remaining demands, deadweight capacity per leg, and a loose total-burn
/// supply cap.
fn cargo_lp_step(ctx: &SeqCtx, times: &[f64], model: WeightModel) -> Option<(Vec<f64>, Vec<f64>)> {
    let m = ctx.seq.len();
    let inst = ctx.task.inst;
    let ship = ctx.ship();
    let w = inst.cargo_unit_weight();
    let c = ship.consumption_const;

    // Per-ton-of-displacement burn on each leg.
    let g: Vec<f64> = ctx
        .dists
        .iter()
        .zip(times)
        .map(|(&d, &t)| if d > 0.0 && t > 0.0 { c * d * d * d / (t * t) } else { 0.0 })
        .collect();
    let g_total: f64 = g.iter().sum();
    let g_prefix = |i: usize| -> f64 { g[..i].iter().sum() }; // legs before position i
    let g_suffix = |i: usize| -> f64 { g[i..].iter().sum() }; // legs from position i on

    let lambda = ctx.fuel_value;
    let mut objective = Vec::with_capacity(2 * m);
    let mut upper = Vec::with_capacity(2 * m);
    let mut del_burden = Vec::with_capacity(m);
    let mut pick_burden = Vec::with_capacity(m);
    for i in 1..=m {
        let port = inst.port(ctx.seq[i - 1]);
        let (bd, bp) = match model {
            WeightModel::PerLeg => (w * g_prefix(i), w * g_suffix(i)),
            WeightModel::FrozenAtDeparture => (w * g_total, 0.0),
        };
        del_burden.push(bd);
        pick_burden.push(bp);
        objective.push(port.delivery_revenue - lambda * bd);
        upper.push(ctx.rem_del[i - 1]);
    }
    for i in 1..=m {
        let port = inst.port(ctx.seq[i - 1]);
        objective.push(port.pickup_revenue - lambda * pick_burden[i - 1]);
        upper.push(ctx.rem_pick[i - 1]);
    }

    let mut rows = Vec::with_capacity(m + 2);
    let mut rhs = Vec::with_capacity(m + 2);
    for l in 0..=m {
        let mut row = vec![0.0; 2 * m];
        for i in 1..=m {
            if i > l {
                row[i - 1] = 1.0;
            } else {
                row[m + i - 1] = 1.0;
            }
        }
        rows.push(row);
        rhs.push(ctx.cargo_cap);
    }
    // Loose fuel-supply cap: each position can add at most a full tank above
    // the safety level.
    let supply = (m as f64 + 1.0) * (ship.fuel_capacity - ship.safety_fuel());
    let base_burn = ship.lightweight * g_total;
    let headroom = supply - base_burn;
    if headroom < 0.0 {
        return None;
    }
    let mut burn_row = Vec::with_capacity(2 * m);
    for i in 1..=m {
        burn_row.push(del_burden[i - 1]);
    }
    for i in 1..=m {
        burn_row.push(pick_burden[i - 1]);
    }
    rows.push(burn_row);
    rhs.push(headroom);

    let lp = LinearProgram { objective, rows, rhs, upper };
    let sol = simplex::solve(&lp).ok()?;
    let del = sol.x[..m].to_vec();
    let pick = sol.x[m..].to_vec();
    Some((del, pick))
}

/// Block-coordinate descent for one visit sequence. Starts from the slowest
/// window-feasible speeds and zero cargo, then alternates the quantity and
/// speed blocks, re-solving bunkering after each, and keeps an update only
/// when the audited sequence profit does not decrease.
fn inner_optimize(ctx: &SeqCtx, cfg: &SolverConfig) -> Option<SeqSolution> {
    let m = ctx.seq.len();
    let mut bunker_solves = 0u64;

    let w0 = vec![ctx.ship().lightweight; m + 1];
    let mut times = optimize_leg_times(&ctx.speed_legs(&w0), &ctx.checkpoints)?;
    let mut del = vec![0.0; m];
    let mut pick = vec![0.0; m];
    bunker_solves += 1;
    let mut bunker =
        solve_bunkering(&ctx.bunker_problem(ctx.burns(&times, &del, &pick, cfg.weight_model)))?;
    let mut profit = -bunker.cost;

    let mut rounds = 0u64;
    for _ in 0..cfg.max_rounds {
        let round_start = profit;
        if let Some((d2, p2)) = cargo_lp_step(ctx, &times, cfg.weight_model) {
            bunker_solves += 1;
            if let Some(b2) =
                solve_bunkering(&ctx.bunker_problem(ctx.burns(&times, &d2, &p2, cfg.weight_model)))
            {
                let cand = ctx.revenue(&d2, &p2) - b2.cost;
                if cand > profit {
                    del = d2;
                    pick = p2;
                    bunker = b2;
                    profit = cand;
                }
            }
        }
        let weights = ctx.leg_weights(&del, &pick, cfg.weight_model);
        if let Some(t2) = optimize_leg_times(&ctx.speed_legs(&weights), &ctx.checkpoints) {
            bunker_solves += 1;
            if let Some(b2) =
                solve_bunkering(&ctx.bunker_problem(ctx.burns(&t2, &del, &pick, cfg.weight_model)))
            {
                let cand = ctx.revenue(&del, &pick) - b2.cost;
                if cand > profit {
                    times = t2;
                    bunker = b2;
                    profit = cand;
                }
            }
        }
        rounds += 1;
        if (profit - round_start).abs() <= cfg.rel_tol * profit.abs().max(1.0) {
            break;
        }
    }
    Some(SeqSolution { times, del, pick, bunker, profit, rounds, bunker_solves })
}

/// Assemble the full per-visit record for a solved sequence. Trajectories are
/// recomputed under the true per-leg weight model so the plan is exactly what
/// the verifier will re-derive.
fn build_plan(ctx: &SeqCtx, sol: &SeqSolution) -> ShipPlan {
    let inst = ctx.task.inst;
    let ship = ctx.ship();
    let m = ctx.seq.len();
    let w = inst.cargo_unit_weight();
    let onboard = ctx.onboard(&sol.del, &sol.pick);
    let true_burns = ctx.burns(&sol.times, &sol.del, &sol.pick, WeightModel::PerLeg);

    let mut visits = Vec::with_capacity(m + 2);
    let mut legs = Vec::with_capacity(m + 1);
    let mut fuel = sol.bunker.initial_fuel;
    let mut arrival = 0.0;
    for pos in 0..=m + 1 {
        let port_idx = if pos == 0 || pos == m + 1 { 0 } else { ctx.seq[pos - 1] };
        let (delivery, pickup) = if pos >= 1 && pos <= m {
            (sol.del[pos - 1], sol.pick[pos - 1])
        } else {
            (0.0, 0.0)
        };
        let amount = if pos <= m { sol.bunker.amounts[pos] } else { 0.0 };
        let weight = ship.lightweight + w * onboard[pos.min(m)];
        visits.push(Visit {
            port: port_idx,
            delivery,
            pickup,
            bunker: amount > 0.0,
            bunker_amount: amount,
            arrival,
            fuel_on_entry: fuel,
            weight_on_departure: weight,
        });
        if pos <= m {
            let d = ctx.dists[pos];
            let t = sol.times[pos];
            let speed = if d > 0.0 && t > 0.0 { d / t } else { ship.speed_min };
            let next_port = if pos == m { 0 } else { ctx.seq[pos] };
            legs.push(Leg { from: port_idx, to: next_port, speed });
            arrival += inst.port(port_idx).processing_time + t;
            fuel = fuel + amount - true_burns[pos];
        }
    }
    ShipPlan { chartered: false, visits, legs }
}

/// Best plan over every enumerated visit order, each refined by the inner
/// optimizer. Deterministic: ties in profit break toward the lexicographically
/// smallest sequence, and the parallel reduction uses the same total order.
///
/// An empty assigned set yields a stay-at-depot outcome with zero serving
/// profit (represented as a charter-shaped plan). Errors when more ports are
/// assigned than `cfg.max_assigned_ports`.
pub fn solve_single_ship(
    task: &SingleShipTask,
    cfg: &SolverConfig,
) -> Result<SingleShipOutcome, ModelError> {
    if task.ports.len() > cfg.max_assigned_ports {
        return Err(ModelError::Domain(format!(
            "{} assigned ports exceed the configured cap {}",
            task.ports.len(),
            cfg.max_assigned_ports
        )));
    }
    if task.ports.is_empty() {
        return Ok(SingleShipOutcome::Solved(SingleShipSolution {
            plan: ShipPlan::charter(),
            serving_profit: 0.0,
            diagnostics: Diagnostics::default(),
        }));
    }

    let sequences = enumerate_routes(task);
    let mut diagnostics = Diagnostics { sequences_enumerated: sequences.len() as u64, ..Default::default() };

    let evaluated: Vec<Option<(f64, Vec<usize>, SeqSolution)>> = par::map_vec(sequences, |seq| {
        let ctx = SeqCtx::new(task, &seq);
        inner_optimize(&ctx, cfg).map(|sol| (sol.profit, seq, sol))
    });

    let mut best: Option<(f64, Vec<usize>, SeqSolution)> = None;
    for cand in evaluated.into_iter().flatten() {
        diagnostics.sequences_feasible += 1;
        diagnostics.inner_rounds += cand.2.rounds;
        diagnostics.bunker_solves += cand.2.bunker_solves;
        best = match best {
            None => Some(cand),
            Some(cur) => {
                let better = cand.0 > cur.0 || (cand.0 == cur.0 && cand.1 < cur.1);
                if better {
                    Some(cand)
                } else {
                    Some(cur)
                }
            }
        };
    }

    match best {
        None => Ok(SingleShipOutcome::Infeasible(diagnostics)),
        Some((profit, seq, sol)) => {
            let ctx = SeqCtx::new(task, &seq);
            let plan = build_plan(&ctx, &sol);
            Ok(SingleShipOutcome::Solved(SingleShipSolution {
                plan,
                serving_profit: profit,
                diagnostics,
            }))
        }
    }
}

/// Re-derive a full plan from fixed decisions (route, quantities, leg speeds)
/// with bunkering re-solved exactly under the true weight model. Returns
/// `None` when no bunkering pattern keeps the cycle fuel-feasible, or when a
/// time window breaks. Used to re-audit ablated plans and to patch refined
/// routes.
pub fn rebuild_with_true_fuel(
    inst: &Instance,
    ship_idx: usize,
    seq: &[usize],
    del: &[f64],
    pick: &[f64],
    speeds: &[f64],
) -> Option<(ShipPlan, f64)> {
    let ports: Vec<usize> = {
        let mut p = seq.to_vec();
        p.sort_unstable();
        p
    };
    let task = SingleShipTask::with_full_demands(inst, ship_idx, ports).ok()?;
    let ctx = SeqCtx::new(&task, seq);

    let times: Vec<f64> = ctx
        .dists
        .iter()
        .zip(speeds)
        .map(|(&d, &v)| if d > 0.0 { d / v } else { 0.0 })
        .collect();
    // Windows under the fixed speeds.
    let mut cum = 0.0;
    for (l, &t) in times.iter().enumerate() {
        cum += t;
        let c = &ctx.checkpoints[l];
        if cum < c.lower - 1e-9 || cum > c.upper + 1e-9 {
            return None;
        }
    }
    let burns = ctx.burns(&times, del, pick, WeightModel::PerLeg);
    let bunker = solve_bunkering(&ctx.bunker_problem(burns))?;
    let profit = ctx.revenue(del, pick) - bunker.cost;
    let sol = SeqSolution {
        times,
        del: del.to_vec(),
        pick: pick.to_vec(),
        bunker,
        profit,
        rounds: 0,
        bunker_solves: 1,
    };
    Some((build_plan(&ctx, &sol), profit))
}

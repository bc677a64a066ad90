//! Exact bunkering along a fixed cycle: which ports buy fuel, how much, and
//! the free initial fuel level, minimizing total purchase cost under the
//! per-port incremental-discount schedules.
//!
//! Constraints per position `p` of the cycle (depot start, then each visited
//! customer): a purchase is either zero or at least the minimum batch, the
//! tank holds `capacity`, fuel on entry never drops below `safety`, and fuel
//! at the end of the cycle equals fuel at the start, so purchases sum to the
//! total burned.
//!
//! The objective is concave (piecewise-linear, non-increasing marginal price),
//! so the minimum sits at an extreme point of the feasible polytope. At an
//! extreme point every purchase is pinned by one of: zero, the minimum batch,
//! filling the tank, draining to exactly the safety level at the next entry —
//! except at most one "free" purchase fixed by the cycle closure, and the
//! initial fuel is either at a bound or determined by closure. The solver
//! enumerates exactly these patterns: a small set of candidate initial-fuel
//! values, then a depth-first scan over per-position labels with cost and
//! feasibility pruning. This visits every extreme point, i.e. the optimum is
//! exact, while sharing prefixes keeps it fast enough for inner loops.

use crate::model::PriceSchedule;

/// Amount-level tolerance for batch and capacity bounds, tons.
const AMT_TOL: f64 = 1e-7;
/// Tolerance on the start-equals-end fuel closure, tons.
const CLOSURE_TOL: f64 = 1e-6;
/// Safety valve on the pattern scan; realistic instances stay far below it.
const MAX_NODES: u64 = 8_000_000;

/// Bunkering subproblem for one ship on one fixed route.
#[derive(Debug)]
pub struct BunkerProblem<'a> {
    /// Price schedule at each position of the cycle (position 0 = depot).
    pub prices: Vec<&'a PriceSchedule>,
    /// Fuel burned on the leg leaving each position, tons. Same length as
    /// `prices`; the last entry is the leg returning to the depot.
    pub burns: Vec<f64>,
    /// Tank capacity, tons.
    pub capacity: f64,
    /// Safety fuel level, tons.
    pub safety: f64,
    /// Minimum purchase batch, tons.
    pub min_batch: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BunkerSolution {
    /// Fuel on board at the cycle start (equals fuel at the end).
    pub initial_fuel: f64,
    /// Purchase per position; zero where the ship does not bunker.
    pub amounts: Vec<f64>,
    pub cost: f64,
}

#[derive(Clone, Copy, PartialEq)]
enum FreeState {
    Unused,
    /// Closure purchase placed; `mins_left` minimum batches remain to place downstream.
    Placed { mins_left: usize },
}

struct Scan<'a> {
    prices: &'a [&'a PriceSchedule],
    burns: &'a [f64],
    /// burn_suffix[p] = total burn from position p through the end.
    burn_suffix: Vec<f64>,
    capacity: f64,
    safety: f64,
    min_batch: f64,
    target: f64,
    amounts: Vec<f64>,
    best_cost: f64,
    best: Option<(f64, Vec<f64>)>,
    nodes: u64,
}

impl<'a> Scan<'a> {
    fn positions(&self) -> usize {
        self.burns.len()
    }

    fn record(&mut self, cost: f64) {
        if cost < self.best_cost - 1e-12 {
            self.best_cost = cost;
            self.best = Some((self.target, self.amounts.clone()));
        }
    }

    fn dfs(&mut self, p: usize, entry: f64, cost: f64, free: FreeState) {
        self.nodes += 1;
        if self.nodes > MAX_NODES {
            return;
        }
        if cost >= self.best_cost - 1e-12 {
            return;
        }
        if p == self.positions() {
            let closed = (entry - self.target).abs() <= CLOSURE_TOL;
            let mins_done = matches!(free, FreeState::Unused | FreeState::Placed { mins_left: 0 });
            if closed && mins_done {
                self.record(cost);
            }
            return;
        }
        let remaining = self.positions() - p;
        // Even buying to capacity everywhere ahead cannot keep the tank above
        // the safety level: dead branch.
        let max_future = remaining as f64 * (self.capacity - self.safety);
        if entry + max_future - self.burn_suffix[p] < self.safety - AMT_TOL {
            return;
        }
        let burn = self.burns[p];
        let room = self.capacity - entry;
        let price = self.prices[p];

        match free {
            FreeState::Placed { mins_left } => {
                if mins_left > remaining {
                    return;
                }
                // Skip.
                if mins_left < remaining {
                    let e = entry - burn;
                    if e >= self.safety - AMT_TOL {
                        self.dfs(p + 1, e, cost, free);
                    }
                }
                // Minimum batch.
                if mins_left > 0 && self.min_batch <= room + AMT_TOL {
                    let b = self.min_batch.min(room).max(0.0);
                    let e = entry + b - burn;
                    if e >= self.safety - AMT_TOL {
                        self.amounts[p] = b;
                        self.dfs(p + 1, e, cost + price.cost(b), FreeState::Placed { mins_left: mins_left - 1 });
                        self.amounts[p] = 0.0;
                    }
                }
            }
            FreeState::Unused => {
                // Skip.
                {
                    let e = entry - burn;
                    if e >= self.safety - AMT_TOL {
                        self.dfs(p + 1, e, cost, free);
                    }
                }
                // Minimum batch.
                if self.min_batch <= room + AMT_TOL {
                    let b = self.min_batch.min(room).max(0.0);
                    let e = entry + b - burn;
                    if e >= self.safety - AMT_TOL {
                        self.amounts[p] = b;
                        self.dfs(p + 1, e, cost + price.cost(b), free);
                        self.amounts[p] = 0.0;
                    }
                }
                // Fill the tank.
                if room >= self.min_batch - AMT_TOL && room > 0.0 {
                    let e = self.capacity - burn;
                    if e >= self.safety - AMT_TOL {
                        self.amounts[p] = room;
                        self.dfs(p + 1, e, cost + price.cost(room), free);
                        self.amounts[p] = 0.0;
                    }
                }
                // Buy exactly enough to reach the next entry at the safety level.
                {
                    let b = self.safety + burn - entry;
                    if b >= self.min_batch - AMT_TOL && b <= room + AMT_TOL {
                        let b = b.clamp(0.0, room.max(0.0));
                        self.amounts[p] = b;
                        self.dfs(p + 1, self.safety, cost + price.cost(b), free);
                        self.amounts[p] = 0.0;
                    }
                }
                // Closure purchase: sized so the cycle ends exactly at the
                // start level given j further minimum batches downstream.
                for j in 0..remaining {
                    let b = self.target + self.burn_suffix[p] - j as f64 * self.min_batch - entry;
                    if b < self.min_batch - AMT_TOL || b > room + AMT_TOL {
                        continue;
                    }
                    let b = b.clamp(0.0, room.max(0.0));
                    let e = entry + b - burn;
                    if e >= self.safety - AMT_TOL {
                        self.amounts[p] = b;
                        self.dfs(p + 1, e, cost + price.cost(b), FreeState::Placed { mins_left: j });
                        self.amounts[p] = 0.0;
                    }
                }
            }
        }
    }
}

/// Total purchase cost of a solution under the problem's schedules.
pub fn solution_cost(problem: &BunkerProblem, amounts: &[f64]) -> f64 {
    problem.prices.iter().zip(amounts).map(|(s, &b)| s.cost(b)).sum()
}

/// Check a candidate against every bunkering constraint; used by tests and
/// by callers that patch plans.
pub fn is_feasible(problem: &BunkerProblem, initial_fuel: f64, amounts: &[f64]) -> bool {
    if amounts.len() != problem.burns.len() {
        return false;
    }
    let mut fuel = initial_fuel;
    if fuel < problem.safety - AMT_TOL || fuel > problem.capacity + AMT_TOL {
        return false;
    }
    for (p, &b) in amounts.iter().enumerate() {
        if b != 0.0 && (b < problem.min_batch - AMT_TOL || b < 0.0) {
            return false;
        }
        if fuel + b > problem.capacity + AMT_TOL {
            return false;
        }
        fuel = fuel + b - problem.burns[p];
        if fuel < problem.safety - AMT_TOL {
            return false;
        }
    }
    (fuel - initial_fuel).abs() <= CLOSURE_TOL
}

/// Solve the bunkering problem exactly. Returns `None` when no purchase
/// pattern can keep the cycle fuel-feasible.
pub fn solve_bunkering(problem: &BunkerProblem) -> Option<BunkerSolution> {
    let n = problem.burns.len();
    assert_eq!(problem.prices.len(), n);
    debug_assert!(problem.burns.iter().all(|&b| b >= 0.0));
    let total: f64 = problem.burns.iter().sum();
    if total <= CLOSURE_TOL {
        // Nothing burned: buy nothing, start at the safety level.
        return Some(BunkerSolution {
            initial_fuel: problem.safety,
            amounts: vec![0.0; n],
            cost: 0.0,
        });
    }
    // Purchases sum to the total burn and every positive purchase is at least
    // a minimum batch, so a cycle burning less than one batch is infeasible.
    if total < problem.min_batch - AMT_TOL {
        return None;
    }
    if problem.capacity - problem.safety <= AMT_TOL {
        return None;
    }

    let mut burn_suffix = vec![0.0; n + 1];
    for p in (0..n).rev() {
        burn_suffix[p] = burn_suffix[p + 1] + problem.burns[p];
    }

    // Candidate initial-fuel levels: bounds, plus every anchored entry value
    // propagated to the end of the cycle with any count of minimum batches.
    let mut seeds: Vec<f64> = vec![problem.safety, problem.capacity];
    let push_seed = |v: f64, seeds: &mut Vec<f64>| {
        if v >= problem.safety - AMT_TOL && v <= problem.capacity + AMT_TOL {
            seeds.push(v.clamp(problem.safety, problem.capacity));
        }
    };
    for q in 0..=n {
        let mut anchors = vec![problem.safety, problem.capacity - problem.min_batch];
        if q >= 1 {
            anchors.push(problem.capacity - problem.burns[q - 1]);
        }
        let max_mins = n - q;
        for a in anchors {
            for j in 0..=max_mins {
                push_seed(a - burn_suffix[q] + j as f64 * problem.min_batch, &mut seeds);
            }
        }
    }
    seeds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    seeds.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);

    // Cheap feasible patterns seed the cost bound: all fuel at one position.
    let mut best: Option<BunkerSolution> = None;
    if total >= problem.min_batch - AMT_TOL && total <= problem.capacity - problem.safety + AMT_TOL {
        for p in 0..n {
            let start = problem.safety + burn_suffix[0] - burn_suffix[p];
            if start > problem.capacity + AMT_TOL {
                continue;
            }
            let mut amounts = vec![0.0; n];
            amounts[p] = total;
            let start = start.min(problem.capacity);
            if is_feasible(problem, start, &amounts) {
                let cost = solution_cost(problem, &amounts);
                if best.as_ref().map_or(true, |b| cost < b.cost) {
                    best = Some(BunkerSolution { initial_fuel: start, amounts, cost });
                }
            }
        }
    }

    let mut scan = Scan {
        prices: &problem.prices,
        burns: &problem.burns,
        burn_suffix,
        capacity: problem.capacity,
        safety: problem.safety,
        min_batch: problem.min_batch,
        target: 0.0,
        amounts: vec![0.0; n],
        best_cost: best.as_ref().map_or(f64::INFINITY, |b| b.cost),
        best: None,
        nodes: 0,
    };
    for &t in &seeds {
        scan.target = t;
        scan.dfs(0, t, 0.0, FreeState::Unused);
    }
    if let Some((t, amounts)) = scan.best.take() {
        best = Some(BunkerSolution { initial_fuel: t, cost: solution_cost(problem, &amounts), amounts });
    }
    let mut sol = best?;
    polish(problem, &mut sol);
    Some(sol)
}

/// Nudge the largest purchase so amounts sum exactly to the burned total,
/// keeping the start-equals-end closure tight against verifier tolerances.
fn polish(problem: &BunkerProblem, sol: &mut BunkerSolution) {
    let total: f64 = problem.burns.iter().sum();
    let bought: f64 = sol.amounts.iter().sum();
    let residual = total - bought;
    if residual == 0.0 {
        return;
    }
    if let Some(idx) = sol
        .amounts
        .iter()
        .enumerate()
        .filter(|(_, &b)| b > 0.0)
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
    {
        let adjusted = sol.amounts[idx] + residual;
        if adjusted >= problem.min_batch - AMT_TOL {
            sol.amounts[idx] = adjusted;
        }
    }
    sol.cost = solution_cost(problem, &sol.amounts);
}

//! Ablation experiments: solve with a deliberately impoverished model, then
//! re-audit the resulting plan under the true model and report the profit
//! lost. Two ablations are studied: ignoring the displacement change from
//! cargo (weight frozen at the depot departure value), and ignoring per-port
//! fuel price differences (every port repriced at the fleet-average level).

use anyhow::{anyhow, Result};
use bunkerfleet_core::model::{Assignment, FleetPlan, Instance, PriceSchedule, ShipPlan};
use bunkerfleet_core::search::{evaluate_assignment, mpas_search, MpasParams, SearchState};
use bunkerfleet_core::singleship::{rebuild_with_true_fuel, SolverConfig, WeightModel};
use bunkerfleet_core::verify::evaluate_fleet_plan;

#[derive(Debug, Clone)]
pub struct AblationEntry {
    pub seed: u64,
    pub full_profit: f64,
    /// Ablated plan re-audited under the true model.
    pub ablated_profit: f64,
    /// `1 - ablated / full`.
    pub rel_loss: f64,
    /// Fuel replay needed a uniform speed reduction to stay feasible.
    pub repaired: bool,
    /// No repair restored feasibility; the instance is excluded from means.
    pub excluded: bool,
}

#[derive(Debug, Clone, Default)]
pub struct AblationReport {
    pub entries: Vec<AblationEntry>,
    pub mean_loss: f64,
    pub max_loss: f64,
    pub excluded: usize,
}

impl AblationReport {
    pub fn from_entries(entries: Vec<AblationEntry>) -> Self {
        let kept: Vec<&AblationEntry> = entries.iter().filter(|e| !e.excluded).collect();
        let mean_loss = if kept.is_empty() {
            0.0
        } else {
            kept.iter().map(|e| e.rel_loss).sum::<f64>() / kept.len() as f64
        };
        let max_loss = kept.iter().map(|e| e.rel_loss).fold(0.0f64, f64::max);
        let excluded = entries.len() - kept.len();
        AblationReport { entries, mean_loss, max_loss, excluded }
    }
}

fn mpas_defaults(seed: u64) -> MpasParams {
    MpasParams { samples_per_iter: 10, stagnation: 10, seed, ..Default::default() }
}

/// Solve an instance with the given solver configuration; returns the best
/// assignment, its plan, and the profit under that configuration's model.
fn solve(inst: &Instance, seed: u64, cfg: &SolverConfig) -> Result<(Assignment, FleetPlan, f64)> {
    let y0 = Assignment::zeros(inst.num_ships(), inst.num_customers());
    let mut state = SearchState::new();
    let run = mpas_search(inst, &y0, cfg, &mpas_defaults(seed), &mut state)
        .map_err(|e| anyhow!("solver: {e}"))?;
    Ok((run.best_bits, run.best_plan, run.best_h))
}

struct Decisions {
    seq: Vec<usize>,
    del: Vec<f64>,
    pick: Vec<f64>,
    speeds: Vec<f64>,
}

fn decisions_of(plan: &ShipPlan) -> Decisions {
    let inner = &plan.visits[1..plan.visits.len() - 1];
    Decisions {
        seq: inner.iter().map(|v| v.port).collect(),
        del: inner.iter().map(|v| v.delivery).collect(),
        pick: inner.iter().map(|v| v.pickup).collect(),
        speeds: plan.legs.iter().map(|l| l.speed).collect(),
    }
}

/// Replay a plan's routing, quantities and speeds under the true weight model,
/// re-solving bunkering. On fuel infeasibility, speeds are uniformly scaled
/// down in small steps (less speed, less burn) until the cycle closes or the
/// time windows give out.
fn replay_under_true_weights(inst: &Instance, plan: &FleetPlan) -> Option<(FleetPlan, bool)> {
    let mut plans = Vec::with_capacity(plan.plans.len());
    let mut profits = Vec::with_capacity(plan.plans.len());
    let mut repaired = false;
    for (k, sp) in plan.plans.iter().enumerate() {
        if sp.chartered {
            plans.push(ShipPlan::charter());
            profits.push(inst.ship(k).charter_revenue);
            continue;
        }
        let d = decisions_of(sp);
        let ship = inst.ship(k);
        let mut rebuilt = None;
        for step in 0..=20 {
            let factor = 1.0 - 0.02 * step as f64;
            let speeds: Vec<f64> =
                d.speeds.iter().map(|v| (v * factor).clamp(ship.speed_min, ship.speed_max)).collect();
            if let Some(out) = rebuild_with_true_fuel(inst, k, &d.seq, &d.del, &d.pick, &speeds) {
                if step > 0 {
                    repaired = true;
                }
                rebuilt = Some(out);
                break;
            }
        }
        let (new_plan, serving) = rebuilt?;
        plans.push(new_plan);
        profits.push(serving);
    }
    let total = profits.iter().sum();
    Some((FleetPlan { plans, per_ship_profit: profits, total_profit: total }, repaired))
}

/// The full model may polish any candidate it is handed; fold the replayed
/// plan and the ablated assignment's true evaluation into the baseline so the
/// reported loss is never an artifact of search noise.
fn protected_full(
    inst: &Instance,
    full_h: f64,
    ablated_bits: &Assignment,
    replayed: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    let (h_true, _) = evaluate_assignment(inst, ablated_bits, cfg).map_err(|e| anyhow!("{e}"))?;
    Ok(full_h.max(h_true).max(replayed))
}

/// Weight-ignoring ablation: the solver believes the fuel-rate displacement
/// stays at each iterate's depot-departure value.
pub fn ablate_weight(inst: &Instance, seed: u64) -> Result<AblationEntry> {
    let true_cfg = SolverConfig::default();
    let frozen_cfg = SolverConfig { weight_model: WeightModel::FrozenAtDeparture, ..Default::default() };

    let (_, _, full_h) = solve(inst, seed, &true_cfg)?;
    let (abl_bits, abl_plan, _) = solve(inst, seed, &frozen_cfg)?;

    let Some((replayed_plan, repaired)) = replay_under_true_weights(inst, &abl_plan) else {
        return Ok(AblationEntry {
            seed,
            full_profit: full_h,
            ablated_profit: f64::NAN,
            rel_loss: f64::NAN,
            repaired: true,
            excluded: true,
        });
    };
    let audit = evaluate_fleet_plan(inst, &replayed_plan).map_err(|e| anyhow!("{e}"))?;
    if !audit.is_clean() {
        return Ok(AblationEntry {
            seed,
            full_profit: full_h,
            ablated_profit: f64::NAN,
            rel_loss: f64::NAN,
            repaired,
            excluded: true,
        });
    }
    let ablated = audit.total_profit;
    let full = protected_full(inst, full_h, &abl_bits, ablated, &true_cfg)?;
    Ok(AblationEntry {
        seed,
        full_profit: full,
        ablated_profit: ablated,
        rel_loss: 1.0 - ablated / full,
        repaired,
        excluded: false,
    })
}

/// Flatten all schedules to a single tier at the unweighted mean of the
/// ports' first-tier prices.
pub fn average_price_instance(inst: &Instance) -> Instance {
    let mean: f64 =
        inst.ports().iter().map(|p| p.prices.base_price()).sum::<f64>() / inst.num_ports() as f64;
    let ports = inst
        .ports()
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q.prices = PriceSchedule::single(mean).unwrap();
            q
        })
        .collect();
    Instance::new(
        ports,
        inst.ships().to_vec(),
        inst.cargo_unit_weight(),
        inst.coord_scale(),
        Some(inst.distances().to_vec()),
    )
    .expect("repricing preserves validity")
}

/// Price-blind ablation: every port is repriced at the average level, the
/// solver plans against that, and the plan (bunker volumes included) is then
/// costed at the true prices. Feasibility is price-independent, so the replay
/// never needs repair.
pub fn ablate_price(inst: &Instance, seed: u64) -> Result<AblationEntry> {
    let cfg = SolverConfig::default();
    let (_, _, full_h) = solve(inst, seed, &cfg)?;

    let flat = average_price_instance(inst);
    let (abl_bits, abl_plan, _) = solve(&flat, seed, &cfg)?;

    // Same decisions, true prices: only the profit fields change.
    let audit = evaluate_fleet_plan(inst, &abl_plan).map_err(|e| anyhow!("{e}"))?;
    let structural: Vec<_> = audit
        .violations
        .iter()
        .filter(|v| v.class != bunkerfleet_core::ConstraintClass::ProfitMismatch)
        .collect();
    if !structural.is_empty() {
        return Err(anyhow!("price replay must stay feasible: {structural:?}"));
    }
    let ablated = audit.total_profit;
    let full = protected_full(inst, full_h, &abl_bits, ablated, &cfg)?;
    Ok(AblationEntry {
        seed,
        full_profit: full,
        ablated_profit: ablated,
        rel_loss: 1.0 - ablated / full,
        repaired: false,
        excluded: false,
    })
}

/// Run one ablation across a batch of instances.
pub fn run_batch<F>(instances: &[Instance], base_seed: u64, ablate: F) -> Result<AblationReport>
where
    F: Fn(&Instance, u64) -> Result<AblationEntry> + Sync,
{
    let entries = bunkerfleet_core::par::map_vec(
        instances.iter().enumerate().collect::<Vec<_>>(),
        |(i, inst)| ablate(inst, base_seed + i as u64),
    );
    let entries: Result<Vec<AblationEntry>> = entries.into_iter().collect();
    Ok(AblationReport::from_entries(entries?))
}

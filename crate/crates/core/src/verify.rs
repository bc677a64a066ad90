//! Independent plan verifier and profit auditor.
//!
//! [`evaluate_fleet_plan`] re-derives every trajectory (weights, fuel, arrival
//! times) from the plan's decisions alone and checks each model constraint,
//! reporting named violations instead of trusting the stored values. Stored
//! trajectory fields are cross-checked against the recomputed ones and any
//! disagreement is flagged under the constraint that defines the trajectory.
//!
//! Conditional (big-M) constraints are checked directly on traveled legs
//! only, which is exact and avoids any M constant.

use crate::model::{FleetPlan, Instance, ModelError, ShipPlan};
use crate::FEAS_TOL;
use std::fmt;

/// Constraint families of the model, used to classify violations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintClass {
    /// Served quantity exceeds port demand.
    Demand,
    /// Route shape: depot start/end, customers visited at most once, leg/visit agreement.
    Route,
    /// Initial displacement must equal lightweight plus all deliveries on board.
    WeightInit,
    /// Displacement change at a port must equal pickups minus deliveries.
    WeightStep,
    /// Displacement above deadweight.
    DeadweightCapacity,
    /// Fuel on board at cycle start and end must be equal.
    FuelBalance,
    /// Fuel change along a leg must match the consumption law.
    FuelStep,
    /// Bunkering at a position where it is not allowed.
    BunkerPlacement,
    /// Bunkering amount outside the allowed batch range for its flag.
    BunkerBatch,
    /// Fuel on entry below the safety level.
    SafetyFuel,
    /// Fuel on board plus purchase above tank capacity.
    TankCapacity,
    /// Cycle must start at time zero.
    TimeStart,
    /// Arrival times must match leg travel plus processing times.
    TimeStep,
    /// Arrival outside a port's time window.
    TimeWindow,
    /// Return to depot after the cycle deadline.
    CycleDeadline,
    /// Negative quantity or bunker amount.
    Negativity,
    /// Leg speed outside the ship's speed range.
    SpeedRange,
    /// Stored profit disagrees with the audited value.
    ProfitMismatch,
}

impl ConstraintClass {
    /// Identifier of the corresponding constraint(s) in the fleet model.
    pub fn constraint_ref(self) -> &'static str {
        use ConstraintClass::*;
        match self {
            Demand => "(1)",
            Route => "(2)-(6)",
            WeightInit => "(7)",
            WeightStep => "(8)-(9)",
            DeadweightCapacity => "(10)",
            FuelBalance => "(11)",
            FuelStep => "(12)-(13)",
            BunkerPlacement => "(14)",
            BunkerBatch => "(15)",
            SafetyFuel => "(16)",
            TankCapacity => "(17)",
            TimeStart => "(18)",
            TimeStep => "(19)-(20)",
            TimeWindow => "(21)-(22)",
            CycleDeadline => "(22)",
            Negativity => "(23)",
            SpeedRange => "speed box",
            ProfitMismatch => "objective",
        }
    }
}

impl fmt::Display for ConstraintClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {}", self, self.constraint_ref())
    }
}

/// One named constraint violation, with the ship / port it occurred at.
#[derive(Debug, Clone)]
pub struct Violation {
    pub class: ConstraintClass,
    /// 0-based ship index, when ship-specific.
    pub ship: Option<usize>,
    /// 0-based port index, when port-specific.
    pub port: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.class)?;
        if let Some(s) = self.ship {
            write!(f, " ship {}", s + 1)?;
        }
        if let Some(p) = self.port {
            write!(f, " port {}", p + 1)?;
        }
        write!(f, ": {}", self.detail)
    }
}

/// Result of auditing a plan: the recomputed profit and any violations.
#[derive(Debug, Clone)]
pub struct AuditReport {
    /// Profit recomputed from the plan's decisions.
    pub total_profit: f64,
    pub per_ship_profit: Vec<f64>,
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Auditor<'a> {
    inst: &'a Instance,
    violations: Vec<Violation>,
}

impl<'a> Auditor<'a> {
    fn flag(&mut self, class: ConstraintClass, ship: Option<usize>, port: Option<usize>, detail: String) {
        self.violations.push(Violation { class, ship, port, detail });
    }

    /// Audit one sailing ship's plan; returns its serving profit (revenue minus fuel cost).
    fn audit_ship(&mut self, ship_idx: usize, plan: &ShipPlan) -> Result<f64, ModelError> {
        let inst = self.inst;
        let ship = inst.ship(ship_idx);
        let n = inst.num_ports();
        let w = inst.cargo_unit_weight();
        let k = Some(ship_idx);

        for v in &plan.visits {
            if v.port >= n {
                return Err(ModelError::Shape(format!(
                    "ship {} visits port index {} out of range",
                    ship_idx + 1,
                    v.port
                )));
            }
        }
        if plan.visits.len() < 3 {
            self.flag(
                ConstraintClass::Route,
                k,
                None,
                "a sailing ship must leave the depot for at least one customer".into(),
            );
            return Ok(0.0);
        }
        if plan.legs.len() != plan.visits.len() - 1 {
            return Err(ModelError::Shape(format!(
                "ship {}: {} legs for {} visits",
                ship_idx + 1,
                plan.legs.len(),
                plan.visits.len()
            )));
        }
        let first = &plan.visits[0];
        let last = plan.visits.last().unwrap();
        if first.port != 0 || last.port != 0 {
            self.flag(ConstraintClass::Route, k, None, "cycle must start and end at the depot".into());
        }
        let mut seen = vec![false; n];
        for v in &plan.visits[1..plan.visits.len() - 1] {
            if v.port == 0 {
                self.flag(ConstraintClass::Route, k, Some(0), "depot revisited mid-cycle".into());
            } else if seen[v.port] {
                self.flag(ConstraintClass::Route, k, Some(v.port), "customer visited twice".into());
            }
            seen[v.port] = true;
        }
        for (l, leg) in plan.legs.iter().enumerate() {
            if leg.from != plan.visits[l].port || leg.to != plan.visits[l + 1].port {
                self.flag(ConstraintClass::Route, k, None, format!("leg {l} does not match the visit sequence"));
            }
            let lo = ship.speed_min - FEAS_TOL;
            let hi = ship.speed_max + FEAS_TOL;
            let d = inst.distance(leg.from, leg.to);
            if d > 0.0 && !(leg.speed >= lo && leg.speed <= hi) {
                self.flag(
                    ConstraintClass::SpeedRange,
                    k,
                    None,
                    format!("leg {l} speed {} outside [{}, {}]", leg.speed, ship.speed_min, ship.speed_max),
                );
            }
        }

        // Quantity sign checks and the depot's zero-demand service.
        for v in &plan.visits {
            if v.delivery < -FEAS_TOL || v.pickup < -FEAS_TOL || v.bunker_amount < -FEAS_TOL {
                self.flag(ConstraintClass::Negativity, k, Some(v.port), "negative quantity".into());
            }
            if v.port == 0 && (v.delivery.abs() > FEAS_TOL || v.pickup.abs() > FEAS_TOL) {
                self.flag(ConstraintClass::Demand, k, Some(0), "cargo service at the depot".into());
            }
        }

        // Weight trajectory, recomputed from quantities.
        let total_delivery: f64 = plan.visits.iter().map(|v| v.delivery).sum();
        let mut weight = ship.lightweight + w * total_delivery;
        if (first.weight_on_departure - weight).abs() > FEAS_TOL {
            self.flag(
                ConstraintClass::WeightInit,
                k,
                Some(0),
                format!("departure weight {} != lightweight + deliveries {}", first.weight_on_departure, weight),
            );
        }
        let mut weights = Vec::with_capacity(plan.visits.len());
        weights.push(weight);
        for v in &plan.visits[1..] {
            weight += w * (v.pickup - v.delivery);
            weights.push(weight);
            if (v.weight_on_departure - weight).abs() > FEAS_TOL {
                self.flag(
                    ConstraintClass::WeightStep,
                    k,
                    Some(v.port),
                    format!("stored weight {} != recomputed {}", v.weight_on_departure, weight),
                );
            }
        }
        for (&wt, v) in weights.iter().zip(&plan.visits) {
            if wt > ship.deadweight + FEAS_TOL {
                self.flag(
                    ConstraintClass::DeadweightCapacity,
                    k,
                    Some(v.port),
                    format!("displacement {wt} above deadweight {}", ship.deadweight),
                );
            }
        }

        // Fuel trajectory. Bunker rules first, then conservation along legs.
        let cap = ship.fuel_capacity;
        let safety = ship.safety_fuel();
        let min_batch = ship.min_bunker();
        let last_idx = plan.visits.len() - 1;
        for (i, v) in plan.visits.iter().enumerate() {
            if i == last_idx {
                // The virtual end-of-cycle depot call cannot bunker.
                if v.bunker || v.bunker_amount.abs() > FEAS_TOL {
                    self.flag(
                        ConstraintClass::BunkerPlacement,
                        k,
                        Some(v.port),
                        "bunkering recorded at the end-of-cycle depot call".into(),
                    );
                }
                continue;
            }
            if v.bunker {
                if v.bunker_amount < min_batch - FEAS_TOL || v.bunker_amount > cap + FEAS_TOL {
                    self.flag(
                        ConstraintClass::BunkerBatch,
                        k,
                        Some(v.port),
                        format!("amount {} outside [{min_batch}, {cap}]", v.bunker_amount),
                    );
                }
            } else if v.bunker_amount.abs() > FEAS_TOL {
                self.flag(
                    ConstraintClass::BunkerBatch,
                    k,
                    Some(v.port),
                    format!("amount {} with bunkering off", v.bunker_amount),
                );
            }
        }
        let mut fuel = first.fuel_on_entry;
        let mut fuel_cost = 0.0;
        for (i, v) in plan.visits.iter().enumerate() {
            if i > 0 && (v.fuel_on_entry - fuel).abs() > FEAS_TOL {
                self.flag(
                    ConstraintClass::FuelStep,
                    k,
                    Some(v.port),
                    format!("stored fuel on entry {} != recomputed {}", v.fuel_on_entry, fuel),
                );
            }
            if fuel < safety - FEAS_TOL {
                self.flag(
                    ConstraintClass::SafetyFuel,
                    k,
                    Some(v.port),
                    format!("fuel on entry {fuel} below safety level {safety}"),
                );
            }
            let bought = if i == last_idx { 0.0 } else { v.bunker_amount.max(0.0) };
            if fuel + bought > cap + FEAS_TOL {
                self.flag(
                    ConstraintClass::TankCapacity,
                    k,
                    Some(v.port),
                    format!("fuel {fuel} + purchase {bought} above capacity {cap}"),
                );
            }
            if i < last_idx {
                fuel_cost += inst.port(v.port).prices.cost(bought);
                let leg = &plan.legs[i];
                let d = inst.distance(leg.from, leg.to);
                let burn = if d > 0.0 { d * ship.burn_rate(weights[i].max(1e-12), leg.speed) } else { 0.0 };
                fuel = fuel + bought - burn;
            }
        }
        if (fuel - first.fuel_on_entry).abs() > FEAS_TOL {
            self.flag(
                ConstraintClass::FuelBalance,
                k,
                None,
                format!("end-of-cycle fuel {} != initial fuel {}", fuel, first.fuel_on_entry),
            );
        }

        // Arrival times.
        if first.arrival.abs() > FEAS_TOL {
            self.flag(ConstraintClass::TimeStart, k, Some(0), format!("cycle starts at {}", first.arrival));
        }
        let mut time = 0.0;
        for (i, leg) in plan.legs.iter().enumerate() {
            let d = inst.distance(leg.from, leg.to);
            let travel = if d > 0.0 { d / leg.speed } else { 0.0 };
            time += inst.port(plan.visits[i].port).processing_time + travel;
            let v = &plan.visits[i + 1];
            if (v.arrival - time).abs() > FEAS_TOL {
                self.flag(
                    ConstraintClass::TimeStep,
                    k,
                    Some(v.port),
                    format!("stored arrival {} != recomputed {}", v.arrival, time),
                );
            }
            if v.port != 0 {
                let p = inst.port(v.port);
                if time < p.window_open - FEAS_TOL || time > p.window_close + FEAS_TOL {
                    self.flag(
                        ConstraintClass::TimeWindow,
                        k,
                        Some(v.port),
                        format!("arrival {time} outside [{}, {}]", p.window_open, p.window_close),
                    );
                }
            }
        }
        if time > ship.cycle_deadline + FEAS_TOL {
            self.flag(
                ConstraintClass::CycleDeadline,
                k,
                None,
                format!("returns at {time}, deadline {}", ship.cycle_deadline),
            );
        }

        let revenue: f64 = plan
            .visits
            .iter()
            .filter(|v| v.port != 0)
            .map(|v| {
                let p = inst.port(v.port);
                p.delivery_revenue * v.delivery.max(0.0) + p.pickup_revenue * v.pickup.max(0.0)
            })
            .sum();
        Ok(revenue - fuel_cost)
    }
}

/// Audit `plan` against `inst`: recompute every trajectory and the fleet
/// profit, and report all constraint violations found.
///
/// Shape mismatches (wrong ship count, port index out of range, leg/visit
/// count disagreement) are hard errors; everything semantic is a [`Violation`].
/// The audit itself is a pure function of its inputs.
pub fn evaluate_fleet_plan(inst: &Instance, plan: &FleetPlan) -> Result<AuditReport, ModelError> {
    if plan.plans.len() != inst.num_ships() {
        return Err(ModelError::Shape(format!(
            "plan covers {} ships, instance has {}",
            plan.plans.len(),
            inst.num_ships()
        )));
    }
    if plan.per_ship_profit.len() != inst.num_ships() {
        return Err(ModelError::Shape("per-ship profit vector length mismatch".into()));
    }
    let mut auditor = Auditor { inst, violations: Vec::new() };
    let mut per_ship = Vec::with_capacity(plan.plans.len());
    for (k, sp) in plan.plans.iter().enumerate() {
        let profit = if sp.chartered {
            if !sp.visits.is_empty() || !sp.legs.is_empty() {
                auditor.flag(
                    ConstraintClass::Route,
                    Some(k),
                    None,
                    "chartered ship records visits or legs".into(),
                );
            }
            inst.ship(k).charter_revenue
        } else {
            auditor.audit_ship(k, sp)?
        };
        per_ship.push(profit);
    }

    // Global demand caps: service summed across the fleet per port.
    for port_idx in 1..inst.num_ports() {
        let (mut del, mut pick) = (0.0, 0.0);
        for sp in &plan.plans {
            for v in &sp.visits {
                if v.port == port_idx {
                    del += v.delivery.max(0.0);
                    pick += v.pickup.max(0.0);
                }
            }
        }
        let p = inst.port(port_idx);
        if del > p.delivery_demand + FEAS_TOL {
            auditor.flag(
                ConstraintClass::Demand,
                None,
                Some(port_idx),
                format!("fleet delivers {del}, demand {}", p.delivery_demand),
            );
        }
        if pick > p.pickup_demand + FEAS_TOL {
            auditor.flag(
                ConstraintClass::Demand,
                None,
                Some(port_idx),
                format!("fleet picks up {pick}, demand {}", p.pickup_demand),
            );
        }
    }

    let total: f64 = per_ship.iter().sum();
    if (total - plan.total_profit).abs() > FEAS_TOL * (1.0 + total.abs()) {
        auditor.flag(
            ConstraintClass::ProfitMismatch,
            None,
            None,
            format!("stored profit {} != audited {}", plan.total_profit, total),
        );
    }
    Ok(AuditReport { total_profit: total, per_ship_profit: per_ship, violations: auditor.violations })
}

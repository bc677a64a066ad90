//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured numbers. Run with `cargo test -p bunkerfleet-harness --test
//! acceptance -- --nocapture` to see them.

use bunkerfleet_core::model::{Assignment, FleetPlan, Instance, Port, PriceSchedule, Ship};
use bunkerfleet_core::oracle::{gap, oracle_solve, OracleConfig};
use bunkerfleet_core::search::{
    evaluate_assignment, is_local_optimum, mpas_search, neighborhood_search, refine, sample_mpa,
    MpasParams, NsParams, SearchState,
};
use bunkerfleet_core::singleship::{
    solve_single_ship, SingleShipOutcome, SingleShipTask, SolverConfig,
};
use bunkerfleet_core::verify::{evaluate_fleet_plan, ConstraintClass};
use bunkerfleet_core::FEAS_TOL;
use bunkerfleet_harness::ablation::{ablate_price, ablate_weight, run_batch};
use bunkerfleet_harness::benchrun::{run_bench, BenchParams};
use bunkerfleet_harness::generator::generate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

// ---------------------------------------------------------------------------
// Criterion 1: verifier soundness under injected violations.
// ---------------------------------------------------------------------------

/// Recompute every derived field (weights, fuel trajectory, arrivals, profits)
/// from a plan's decisions so that an injected defect breaks exactly the
/// targeted constraint and nothing else. The end-of-cycle bunker fields are
/// left untouched (the verifier treats them as placement violations).
fn refresh(inst: &Instance, plan: &FleetPlan) -> FleetPlan {
    let mut out = plan.clone();
    let w = inst.cargo_unit_weight();
    for (k, sp) in out.plans.iter_mut().enumerate() {
        if sp.chartered {
            out.per_ship_profit[k] = inst.ship(k).charter_revenue;
            continue;
        }
        let ship = inst.ship(k);
        let total_del: f64 = sp.visits.iter().map(|v| v.delivery).sum();
        let mut weight = ship.lightweight + w * total_del;
        let last = sp.visits.len() - 1;
        let mut fuel = sp.visits[0].fuel_on_entry;
        let mut arrival = 0.0;
        let mut revenue = 0.0;
        let mut fuel_cost = 0.0;
        for i in 0..sp.visits.len() {
            if i > 0 {
                let v = &sp.visits[i];
                weight += w * (v.pickup - v.delivery);
            }
            sp.visits[i].weight_on_departure = weight;
            sp.visits[i].arrival = arrival;
            sp.visits[i].fuel_on_entry = fuel;
            let v = &sp.visits[i];
            if v.port != 0 {
                let p = inst.port(v.port);
                revenue += p.delivery_revenue * v.delivery + p.pickup_revenue * v.pickup;
            }
            if i < last {
                let bought = v.bunker_amount;
                fuel_cost += inst.port(v.port).prices.cost(bought.max(0.0));
                let leg = &sp.legs[i];
                let d = inst.distance(leg.from, leg.to);
                let burn = if d > 0.0 { d * ship.burn_rate(weight.max(1e-9), leg.speed) } else { 0.0 };
                fuel = fuel + bought - burn;
                arrival += inst.port(v.port).processing_time + if d > 0.0 { d / leg.speed } else { 0.0 };
            }
        }
        out.per_ship_profit[k] = revenue - fuel_cost;
    }
    out.total_profit = out.per_ship_profit.iter().sum();
    out
}

/// Restore the start-equals-end fuel closure after an injection changed some
/// burn, by adjusting the ship's first bunkering purchase. Returns the
/// re-refreshed plan, or `None` when the adjustment would break the batch
/// floor.
fn rebalance_fuel(inst: &Instance, plan: FleetPlan, k: usize) -> Option<FleetPlan> {
    let refreshed = refresh(inst, &plan);
    let sp = &refreshed.plans[k];
    let imbalance = sp.visits.last().unwrap().fuel_on_entry - sp.visits[0].fuel_on_entry;
    if imbalance.abs() <= 1e-9 {
        return Some(refreshed);
    }
    let mut out = refreshed.clone();
    let first_bunker = out.plans[k].visits.iter().position(|v| v.bunker)?;
    let v = &mut out.plans[k].visits[first_bunker];
    let adjusted = v.bunker_amount - imbalance;
    if adjusted < inst.ship(k).min_bunker() + 1e-6 {
        return None;
    }
    v.bunker_amount = adjusted;
    Some(refresh(inst, &out))
}

/// Try to inject a violation of exactly `class` into the plan; the caller
/// post-checks the verifier's verdict.
fn inject(
    inst: &Instance,
    plan: &FleetPlan,
    class: ConstraintClass,
    rng: &mut ChaCha8Rng,
) -> Option<FleetPlan> {
    let mut p = plan.clone();
    let sailing: Vec<usize> =
        p.plans.iter().enumerate().filter(|(_, sp)| !sp.chartered).map(|(k, _)| k).collect();
    if sailing.is_empty() {
        return None;
    }
    let k = sailing[rng.gen_range(0..sailing.len())];
    let ship = inst.ship(k).clone();
    let n_visits = p.plans[k].visits.len();
    match class {
        ConstraintClass::Demand => {
            // Serve one unit beyond the port demand: needs a port whose fleet
            // service is already exhausted, so one extra TEU breaks only (1).
            let unit = inst.cargo_unit_weight();
            let max_weight = p.plans[k]
                .visits
                .iter()
                .map(|v| v.weight_on_departure)
                .fold(0.0f64, f64::max);
            if max_weight + 1.5 * unit > ship.deadweight {
                return None;
            }
            let fleet_served = |port: usize| -> f64 {
                p.plans
                    .iter()
                    .flat_map(|sp| sp.visits.iter())
                    .filter(|v| v.port == port)
                    .map(|v| v.delivery)
                    .sum()
            };
            let cands: Vec<usize> = (1..n_visits - 1)
                .filter(|&i| {
                    let v = &p.plans[k].visits[i];
                    v.delivery > 0.0
                        && fleet_served(v.port) >= inst.port(v.port).delivery_demand - 1e-6
                })
                .collect();
            if cands.is_empty() {
                return None;
            }
            let i = cands[rng.gen_range(0..cands.len())];
            p.plans[k].visits[i].delivery += 1.0;
            rebalance_fuel(inst, p, k)
        }
        ConstraintClass::DeadweightCapacity => {
            // Load past the deadweight while staying inside every port's
            // demand: distribute extra deliveries over the visited ports
            // until the departure weight tops the deadweight.
            let fleet_served = |plan: &FleetPlan, port: usize| -> f64 {
                plan.plans
                    .iter()
                    .flat_map(|sp| sp.visits.iter())
                    .filter(|v| v.port == port)
                    .map(|v| v.delivery)
                    .sum()
            };
            let unit = inst.cargo_unit_weight();
            let max_weight = p.plans[k]
                .visits
                .iter()
                .map(|v| v.weight_on_departure)
                .fold(0.0f64, f64::max);
            let mut needed = (ship.deadweight - max_weight) / unit + 1.0;
            for i in 1..n_visits - 1 {
                if needed <= 0.0 {
                    break;
                }
                let port = p.plans[k].visits[i].port;
                let room = inst.port(port).delivery_demand - fleet_served(&p, port);
                let take = needed.min(room - 1.0);
                if take > 0.0 {
                    p.plans[k].visits[i].delivery += take;
                    needed -= take;
                }
            }
            if needed > 0.0 {
                return None;
            }
            rebalance_fuel(inst, p, k)
        }
        ConstraintClass::BunkerPlacement => {
            let v = p.plans[k].visits.last_mut().unwrap();
            v.bunker = true;
            v.bunker_amount = ship.min_bunker();
            Some(p) // no refresh needed: the end-of-cycle call is outside the fuel chain
        }
        ConstraintClass::BunkerBatch => {
            let cands: Vec<usize> =
                (0..n_visits - 1).filter(|&i| !p.plans[k].visits[i].bunker).collect();
            if cands.is_empty() {
                return None;
            }
            let i = cands[rng.gen_range(0..cands.len())];
            p.plans[k].visits[i].bunker = true; // flag on, amount stays zero
            Some(refresh(inst, &p))
        }
        ConstraintClass::SafetyFuel => {
            let margin = p.plans[k]
                .visits
                .iter()
                .map(|v| v.fuel_on_entry - ship.safety_fuel())
                .fold(f64::INFINITY, f64::min);
            p.plans[k].visits[0].fuel_on_entry -= margin + 1.0;
            Some(refresh(inst, &p))
        }
        ConstraintClass::TankCapacity => {
            let headroom = p.plans[k]
                .visits
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let bought = if i + 1 == n_visits { 0.0 } else { v.bunker_amount };
                    ship.fuel_capacity - v.fuel_on_entry - bought
                })
                .fold(f64::INFINITY, f64::min);
            p.plans[k].visits[0].fuel_on_entry += headroom + 1.0;
            Some(refresh(inst, &p))
        }
        ConstraintClass::TimeWindow => {
            // Slow a customer's inbound leg until the arrival misses its
            // window; needs the slowest sailing to land past the close and
            // the cycle deadline to absorb the delay.
            for i in 1..n_visits - 1 {
                let port = p.plans[k].visits[i].port;
                if port == 0 {
                    continue;
                }
                let close = inst.port(port).window_close;
                let prev = &p.plans[k].visits[i - 1];
                let depart = prev.arrival + inst.port(prev.port).processing_time;
                let leg = &p.plans[k].legs[i - 1];
                let d = inst.distance(leg.from, leg.to);
                if d <= 0.0 || depart + d / ship.speed_min < close + 1.0 {
                    continue;
                }
                let new_speed = d / (close + 1.0 - depart);
                if !(ship.speed_min..=ship.speed_max).contains(&new_speed) {
                    continue;
                }
                let delay = close + 1.0 - (prev.arrival
                    + inst.port(prev.port).processing_time
                    + d / leg.speed);
                let final_arrival = p.plans[k].visits.last().unwrap().arrival;
                if delay <= 0.0 || final_arrival + delay > ship.cycle_deadline - 0.5 {
                    continue;
                }
                p.plans[k].legs[i - 1].speed = new_speed;
                return rebalance_fuel(inst, p, k);
            }
            None
        }
        ConstraintClass::CycleDeadline => {
            // Slow the return leg until the ship misses the cycle deadline.
            let leg_idx = n_visits - 2;
            let prev = &p.plans[k].visits[leg_idx];
            let depart = prev.arrival + inst.port(prev.port).processing_time;
            let leg = &p.plans[k].legs[leg_idx];
            let d = inst.distance(leg.from, leg.to);
            if d <= 0.0 || depart + d / ship.speed_min < ship.cycle_deadline + 1.0 {
                return None;
            }
            let new_speed = d / (ship.cycle_deadline + 1.0 - depart);
            if !(ship.speed_min..=ship.speed_max).contains(&new_speed) || new_speed >= leg.speed {
                return None;
            }
            p.plans[k].legs[leg_idx].speed = new_speed;
            rebalance_fuel(inst, p, k)
        }
        _ => None,
    }
}

/// Instance whose one profitable route has a binding time structure: a tight
/// window at the first port (for window injections) or a tight cycle deadline
/// (for deadline injections).
fn tight_time_case(seed: u64, tight_deadline: bool) -> (Instance, FleetPlan) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mk = |id: usize, x: f64, y: f64, del: f64, pick: f64, close: f64| Port {
        id,
        x,
        y,
        delivery_demand: del,
        delivery_revenue: 250.0,
        pickup_demand: pick,
        pickup_revenue: 250.0,
        window_open: 0.0,
        window_close: close,
        processing_time: 10.0,
        prices: PriceSchedule::single(640.0).unwrap(),
    };
    let ax = rng.gen_range(3.2..4.2);
    let bx = rng.gen_range(0.8..1.5);
    let d0 = 100.0 * ax; // depot -> A
    let (a_close, deadline) = if tight_deadline {
        (1e6, 0.0) // deadline filled in below
    } else {
        // Slowest arrival misses, fastest makes it comfortably.
        (10.0 + d0 / 19.0, 1e6)
    };
    let ports = vec![
        mk(1, 0.0, 0.0, 0.0, 0.0, 1e6),
        mk(2, ax, 0.0, rng.gen_range(1200.0..1800.0), 0.0, a_close),
        mk(3, ax + bx, 0.0, 0.0, rng.gen_range(1200.0..1800.0), 1e6),
    ];
    let mut ship = Ship {
        id: 1,
        lightweight: 2000.0,
        deadweight: 7000.0,
        fuel_capacity: 1500.0,
        min_bunker_fraction: 0.05,
        safety_fraction: 0.05,
        consumption_const: 7.55e-7,
        charter_revenue: 1e3,
        cycle_deadline: 1e6,
        speed_min: 14.0,
        speed_max: 24.0,
    };
    if tight_deadline {
        let tour = d0 + 100.0 * bx + 100.0 * (ax + bx);
        let fastest = tour / 24.0 + 30.0;
        let slowest = tour / 14.0 + 30.0;
        ship.cycle_deadline = (fastest * 1.15).min(slowest - 10.0).max(fastest + 2.0);
        let _ = deadline;
    }
    let inst = Instance::new(ports, vec![ship], 1.0, 100.0, None).unwrap();
    let y = Assignment::from_bit_string(1, 2, "11").unwrap();
    let (_, plan) = evaluate_assignment(&inst, &y, &SolverConfig::default()).unwrap();
    assert!(!plan.plans[0].chartered, "tight-time case must sail (seed {seed})");
    let report = evaluate_fleet_plan(&inst, &plan).unwrap();
    assert!(report.is_clean(), "tight-time case dirty: {:?}", report.violations);
    (inst, plan)
}

#[test]
fn criterion_1_verifier_soundness() {
    let t0 = Instant::now();
    // Pool of clean solved plans with sailing ships and bunkering.
    let cfg = SolverConfig::default();
    let mut pool: Vec<(Instance, FleetPlan)> = Vec::new();
    let mut seed = 0u64;
    while pool.len() < 12 && seed < 200 {
        let inst = generate(10_000 + seed, 5, 2);
        seed += 1;
        let mut y = Assignment::zeros(2, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for b in 0..y.num_bits() {
            if rng.gen_bool(0.4) {
                y.set_bit(b, true);
            }
        }
        let (_, plan) = evaluate_assignment(&inst, &y, &cfg).unwrap();
        let has_bunker = plan
            .plans
            .iter()
            .any(|sp| !sp.chartered && sp.visits.iter().any(|v| v.bunker));
        if has_bunker && evaluate_fleet_plan(&inst, &plan).unwrap().is_clean() {
            pool.push((inst, plan));
        }
    }
    assert!(pool.len() >= 8, "only {} clean bunkering plans found", pool.len());
    // Time-side injections need plans whose time structure actually binds.
    let window_pool: Vec<(Instance, FleetPlan)> =
        (0..6).map(|s| tight_time_case(12_000 + s, false)).collect();
    let deadline_pool: Vec<(Instance, FleetPlan)> =
        (0..6).map(|s| tight_time_case(13_000 + s, true)).collect();

    let classes = [
        ConstraintClass::Demand,
        ConstraintClass::DeadweightCapacity,
        ConstraintClass::BunkerPlacement,
        ConstraintClass::BunkerBatch,
        ConstraintClass::SafetyFuel,
        ConstraintClass::TankCapacity,
        ConstraintClass::TimeWindow,
        ConstraintClass::CycleDeadline,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    let mut exact = 0usize;
    let total = 1000usize;
    for i in 0..total {
        let class = classes[i % classes.len()];
        let source = match class {
            ConstraintClass::TimeWindow => &window_pool,
            ConstraintClass::CycleDeadline => &deadline_pool,
            _ => &pool,
        };
        let mut done = false;
        for attempt in 0..200 {
            let (inst, plan) = &source[(i + attempt) % source.len()];
            let Some(bad) = inject(inst, plan, class, &mut rng) else {
                continue;
            };
            let report = evaluate_fleet_plan(inst, &bad).unwrap();
            if report.violations.is_empty() {
                continue;
            }
            let classes_seen: std::collections::HashSet<_> =
                report.violations.iter().map(|v| v.class).collect();
            if classes_seen.len() == 1 && classes_seen.contains(&class) {
                exact += 1;
                done = true;
                break;
            }
        }
        assert!(done, "case {i}: could not realize a clean {class:?} injection");
    }
    let secs = t0.elapsed().as_secs_f64();
    assert_eq!(exact, total);
    assert!(secs < 10.0, "took {secs:.2}s, budget 10s");
    println!("criterion 1 (verifier soundness): PASS — {exact}/{total} exact flags in {secs:.2}s");
}

// ---------------------------------------------------------------------------
// Criterion 2: equal cruise speed around a zero-activity middle port.
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_equal_speeds_around_dead_middle_port() {
    let t0 = Instant::now();
    let mut checked = 0;
    for case in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(20_000 + case);
        let spread = rng.gen_range(0.6..1.4);
        let base_y = rng.gen_range(3.0..4.5);
        let a = (-spread, base_y + rng.gen_range(-0.5..0.5));
        let m = (rng.gen_range(-0.3..0.3), base_y + rng.gen_range(0.3..0.8));
        let b = (spread, base_y + rng.gen_range(-0.5..0.5));
        let mk = |id: usize, xy: (f64, f64), del: f64, pick: f64| Port {
            id,
            x: xy.0,
            y: xy.1,
            delivery_demand: del,
            delivery_revenue: 150.0,
            pickup_demand: pick,
            pickup_revenue: 150.0,
            window_open: 0.0,
            window_close: 1e6,
            processing_time: 10.0,
            prices: PriceSchedule::single(650.0).unwrap(),
        };
        let mut depot = mk(1, (0.0, 0.0), 0.0, 0.0);
        depot.prices = PriceSchedule::single(620.0).unwrap();
        let mut mid = mk(3, m, 0.0, 0.0);
        mid.prices = PriceSchedule::single(9999.0).unwrap(); // never worth bunkering
        let ports = vec![
            depot,
            mk(2, a, rng.gen_range(1500.0..2500.0), 0.0),
            mid,
            mk(4, b, 0.0, rng.gen_range(1500.0..2500.0)),
        ];
        // Deadline between the fastest and slowest tours so speeds go interior.
        let mut ship = Ship {
            id: 1,
            lightweight: 2000.0,
            deadweight: 7000.0,
            fuel_capacity: 1500.0,
            min_bunker_fraction: 0.05,
            safety_fraction: 0.05,
            consumption_const: 7.55e-7,
            charter_revenue: 1e5,
            cycle_deadline: 1e6,
            speed_min: 14.0,
            speed_max: 24.0,
        };
        let inst0 = Instance::new(ports.clone(), vec![ship.clone()], 1.0, 100.0, None).unwrap();
        let tour: f64 = inst0.distance(0, 1) + inst0.distance(1, 2) + inst0.distance(2, 3) + inst0.distance(3, 0);
        let fastest = tour / 24.0 + 40.0;
        let slowest = tour / 14.0 + 40.0;
        ship.cycle_deadline = (slowest * rng.gen_range(0.75..0.9)).max(fastest * 1.03);
        let inst = Instance::new(ports, vec![ship], 1.0, 100.0, None).unwrap();

        let task = SingleShipTask::with_full_demands(&inst, 0, vec![1, 2, 3]).unwrap();
        let out = solve_single_ship(&task, &SolverConfig::default()).unwrap();
        let SingleShipOutcome::Solved(sol) = out else {
            panic!("case {case}: crafted instance must be feasible");
        };
        let pos = sol.plan.visits.iter().position(|v| v.port == 2).expect("middle port visited");
        let mid_visit = &sol.plan.visits[pos];
        assert!(mid_visit.delivery == 0.0 && mid_visit.pickup == 0.0 && !mid_visit.bunker);
        let v_in = sol.plan.legs[pos - 1].speed;
        let v_out = sol.plan.legs[pos].speed;
        assert!(
            ((v_in - v_out) / v_in).abs() < 1e-6,
            "case {case}: speeds {v_in} vs {v_out} around the idle port"
        );
        checked += 1;
    }
    println!(
        "criterion 2 (equal speeds at idle middle port): PASS — {checked}/100 in {:.2}s",
        t0.elapsed().as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: refinement never loses profit, strictly gains on dead ports.
// ---------------------------------------------------------------------------

/// A two-customer geometry where one port is worth serving and the other is a
/// pure detour (no demands, fuel priced out of the market); assigning both
/// forces a dead call that refinement must drop.
fn dead_port_case(seed: u64) -> (Instance, Assignment) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mk = |id: usize, x: f64, y: f64, del: f64, pick: f64, price: f64| Port {
        id,
        x,
        y,
        delivery_demand: del,
        delivery_revenue: 200.0,
        pickup_demand: pick,
        pickup_revenue: 180.0,
        window_open: 0.0,
        window_close: 168.0,
        processing_time: 10.0,
        prices: PriceSchedule::single(price).unwrap(),
    };
    let ports = vec![
        mk(1, 0.0, 0.0, 0.0, 0.0, 630.0),
        mk(
            2,
            rng.gen_range(-1.0..1.0),
            rng.gen_range(3.0..4.5),
            rng.gen_range(1800.0..2800.0),
            rng.gen_range(0.0..1500.0),
            650.0,
        ),
        mk(3, rng.gen_range(1.5..3.0), rng.gen_range(3.0..5.0), 0.0, 0.0, 5000.0),
    ];
    let ship = Ship {
        id: 1,
        lightweight: 2000.0,
        deadweight: 7000.0,
        fuel_capacity: 1500.0,
        min_bunker_fraction: 0.05,
        safety_fraction: 0.05,
        consumption_const: 7.55e-7,
        charter_revenue: 1e5,
        cycle_deadline: 168.0,
        speed_min: 14.0,
        speed_max: 24.0,
    };
    let inst = Instance::new(ports, vec![ship], 1.0, 100.0, None).unwrap();
    (inst, Assignment::from_bit_string(1, 2, "11").unwrap())
}

#[test]
fn criterion_3_refinement_direction() {
    let t0 = Instant::now();
    let cfg = SolverConfig::default();
    let mut with_dead = 0;
    for case in 0..100u64 {
        // Half the sweep is generator-random coverage, half is geometry that
        // provokes dead calls.
        let (inst, y) = if case % 2 == 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(30_000 + case);
            let ports = rng.gen_range(4..=7usize);
            let ships = rng.gen_range(1..=2usize);
            let inst = generate(31_000 + case, ports, ships);
            let mut y = Assignment::zeros(ships, ports - 1);
            for b in 0..y.num_bits() {
                if rng.gen_bool(0.5) {
                    y.set_bit(b, true);
                }
            }
            (inst, y)
        } else {
            dead_port_case(32_000 + case)
        };
        let (h, plan) = evaluate_assignment(&inst, &y, &cfg).unwrap();
        let dead_exists = plan.plans.iter().any(|sp| {
            !sp.chartered
                && sp.visits.iter().any(|v| {
                    v.port != 0
                        && v.delivery.abs() <= FEAS_TOL
                        && v.pickup.abs() <= FEAS_TOL
                        && v.bunker_amount.abs() <= FEAS_TOL
                })
        });
        let out = refine(&inst, &plan, &y, &cfg).unwrap();
        assert!(out.h >= h - 1e-6, "case {case}: refine lost {} -> {}", h, out.h);
        if dead_exists {
            with_dead += 1;
            assert!(out.h > h + 1e-9, "case {case}: dead port existed but no strict gain");
            assert!(out.changed);
        }
        let audit = evaluate_fleet_plan(&inst, &out.plan).unwrap();
        assert!(audit.is_clean(), "case {case}: {:?}", audit.violations);
    }
    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 120.0, "took {secs:.2}s, budget 2min");
    assert!(with_dead >= 5, "only {with_dead} cases had dead ports; sweep too weak");
    println!(
        "criterion 3 (refinement direction): PASS — 100 cases, {with_dead} with dead ports, {secs:.2}s"
    );
}

// ---------------------------------------------------------------------------
// Criteria 4 + 5: micro-scale oracle equivalence and search invariants.
// ---------------------------------------------------------------------------

#[test]
fn criteria_4_and_5_oracle_equivalence_and_search_invariants() {
    let t0 = Instant::now();
    let cfg = SolverConfig::default();
    let oracle_cfg = OracleConfig::default();
    let total = 30;
    let mut ns_ok = 0;
    let mut mpas_ok = 0;
    for seed in 0..total as u64 {
        let inst = generate(40_000 + seed, 4, 2);
        let res = oracle_solve(&inst, &oracle_cfg).unwrap();
        let y0 = Assignment::zeros(2, 3);

        let mut ns_state = SearchState::new();
        let ns = neighborhood_search(&inst, &y0, &cfg, &NsParams::default(), &mut ns_state).unwrap();
        let mut mpas_state = SearchState::new();
        let params = MpasParams { samples_per_iter: 10, stagnation: 10, seed, ..Default::default() };
        let mp = mpas_search(&inst, &y0, &cfg, &params, &mut mpas_state).unwrap();

        if gap(ns.best_h, res.profit).unwrap().value <= 0.02 {
            ns_ok += 1;
        }
        if gap(mp.best_h, res.profit).unwrap().value <= 0.02 {
            mpas_ok += 1;
        }

        // 5a: every sampled assignment was in the prior iteration's region.
        assert_eq!(mp.region_violations, 0, "seed {seed}: region membership violated");
        // 5b: the incumbent value dominates everything evaluated, and the
        // per-iteration running best never decreases.
        let mut running = f64::NEG_INFINITY;
        let mut per_iter: Vec<(u64, f64)> = Vec::new();
        for r in &mp.trace {
            assert!(r.h <= mp.best_h + 1e-12);
            per_iter.push((r.iteration, r.h));
        }
        let max_iter = per_iter.iter().map(|p| p.0).max().unwrap_or(0);
        for it in 0..=max_iter {
            let m = per_iter
                .iter()
                .filter(|p| p.0 <= it)
                .map(|p| p.1)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(m >= running - 1e-12, "seed {seed}: incumbent decreased at iteration {it}");
            running = m;
        }
        // 5c: NS terminated at a verified local optimum.
        assert!(
            is_local_optimum(&inst, &ns.best_bits, &cfg, &mut ns_state).unwrap(),
            "seed {seed}: NS termination point is not a single-flip local optimum"
        );
    }
    let secs = t0.elapsed().as_secs_f64();
    assert!(ns_ok >= 27, "NS within 2% on only {ns_ok}/{total}");
    assert!(mpas_ok >= 27, "MPAS within 2% on only {mpas_ok}/{total}");
    assert!(secs < 600.0, "took {secs:.2}s, budget 10min");
    println!(
        "criterion 4 (oracle equivalence): PASS — NS {ns_ok}/30, MPAS {mpas_ok}/30 within 2%, {secs:.2}s"
    );
    println!(
        "criterion 5 (MPAS structural invariants): PASS — 0 region violations, monotone incumbents, 30/30 NS local optima"
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: sampler uniformity on hand-enumerable regions.
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_sampler_uniformity() {
    let t0 = Instant::now();
    let charter_plan = |inst: &Instance| -> FleetPlan {
        let per: Vec<f64> = inst.ships().iter().map(|s| s.charter_revenue).collect();
        FleetPlan {
            plans: inst.ships().iter().map(|_| bunkerfleet_core::model::ShipPlan::charter()).collect(),
            per_ship_profit: per.clone(),
            total_profit: per.iter().sum(),
        }
    };
    // 2-bit region {00, 01, 10}: chi-square over 1e5 draws, 2 dof, p > 0.01.
    let inst2 = generate(60_000, 3, 1);
    let plan2 = charter_plan(&inst2);
    let mut state = SearchState::new();
    state.insert_evaluated(Assignment::from_bit_string(1, 2, "00").unwrap(), 10.0, plan2.clone());
    state.insert_evaluated(Assignment::from_bit_string(1, 2, "11").unwrap(), 1.0, plan2);
    let mut rng = ChaCha8Rng::seed_from_u64(61_000);
    let mut counts: std::collections::HashMap<String, usize> = Default::default();
    let draws = 100_000;
    let mut taken = 0;
    while taken < draws {
        let (batch, degraded) = sample_mpa(&state, 1000.min(draws - taken), &mut rng).unwrap();
        assert!(!degraded);
        for y in batch {
            *counts.entry(y.to_string()).or_default() += 1;
            taken += 1;
        }
    }
    assert!(counts.get("11").is_none());
    let e = draws as f64 / 3.0;
    let chi2_2: f64 = ["00", "01", "10"]
        .iter()
        .map(|s| {
            let o = *counts.get(*s).unwrap_or(&0) as f64;
            (o - e) * (o - e) / e
        })
        .sum();
    assert!(chi2_2 < 9.21, "2-bit chi2 = {chi2_2} (2 dof, p=0.01 cut 9.21): {counts:?}");

    // 3-bit region = weight <= 1 strings, 3 dof.
    let inst3 = generate(60_001, 4, 1);
    let plan3 = charter_plan(&inst3);
    let mut state = SearchState::new();
    state.insert_evaluated(Assignment::from_bit_string(1, 3, "000").unwrap(), 10.0, plan3.clone());
    state.insert_evaluated(Assignment::from_bit_string(1, 3, "111").unwrap(), 1.0, plan3);
    let mut counts: std::collections::HashMap<String, usize> = Default::default();
    let mut taken = 0;
    while taken < draws {
        let (batch, degraded) = sample_mpa(&state, 1000.min(draws - taken), &mut rng).unwrap();
        assert!(!degraded);
        for y in batch {
            *counts.entry(y.to_string()).or_default() += 1;
            taken += 1;
        }
    }
    let e = draws as f64 / 4.0;
    let chi2_3: f64 = ["000", "001", "010", "100"]
        .iter()
        .map(|s| {
            let o = *counts.get(*s).unwrap_or(&0) as f64;
            (o - e) * (o - e) / e
        })
        .sum();
    assert!(chi2_3 < 11.34, "3-bit chi2 = {chi2_3} (3 dof, p=0.01 cut 11.34): {counts:?}");
    println!(
        "criterion 6 (sampler uniformity): PASS — chi2 {chi2_2:.2} (2-bit), {chi2_3:.2} (3-bit) over 1e5 draws, {:.2}s",
        t0.elapsed().as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: ablations lose profit in the right direction.
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_ablation_direction() {
    let t0 = Instant::now();
    let instances: Vec<Instance> = (0..100u64).map(|i| generate(70_000 + i, 7, 2)).collect();

    let weight = run_batch(&instances, 71_000, ablate_weight).unwrap();
    for e in weight.entries.iter().filter(|e| !e.excluded) {
        assert!(e.rel_loss >= -1e-6, "seed {}: weight ablation gained {}", e.seed, -e.rel_loss);
    }
    assert!(weight.mean_loss > 0.0, "weight ablation mean loss not positive: {}", weight.mean_loss);

    let price = run_batch(&instances, 72_000, ablate_price).unwrap();
    for e in price.entries.iter().filter(|e| !e.excluded) {
        assert!(e.rel_loss >= -1e-6, "seed {}: price ablation gained {}", e.seed, -e.rel_loss);
    }
    assert!(price.mean_loss > 0.0, "price ablation mean loss not positive: {}", price.mean_loss);

    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 1800.0, "took {secs:.2}s, budget 30min");
    println!(
        "criterion 7 (ablation direction): PASS — weight mean loss {:.2}% (max {:.2}%, {} excluded; study anchor 8.71%), \
         price mean loss {:.2}% (max {:.2}%; study anchor 5.74%), {secs:.1}s",
        100.0 * weight.mean_loss,
        100.0 * weight.max_loss,
        weight.excluded,
        100.0 * price.mean_loss,
        100.0 * price.max_loss,
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: exhaustive solve time blows up with N, the search does not.
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_scaling_behavior() {
    let t0 = Instant::now();
    // Coarse oracle grids keep the exhaustive sweep runnable at N=9; the
    // criterion compares growth rates, not absolute seconds.
    let params = BenchParams {
        sizes: vec![(5, 2), (6, 2), (7, 2), (8, 2), (9, 2)],
        seeds: 5,
        base_seed: 80_000,
        oracle: OracleConfig {
            speed_step: 5.0,
            qty_step: Some(1e12),
            max_assignment_bits: 16,
            max_ports_per_ship: 4,
        },
        mpas_samples: 10,
        mpas_stagnation: 10,
    };
    let (rows, summaries) = run_bench(&params).unwrap();
    assert_eq!(rows.len(), 25, "silent drops in the bench table");
    let at = |n: usize| summaries.iter().find(|s| s.ports == n).unwrap();
    let oracle5 = at(5).oracle_mean_secs.expect("oracle must run at N=5");
    let oracle9 = at(9).oracle_mean_secs.expect("oracle must run at N=9");
    let mpas5 = at(5).mpas_mean_secs;
    let mpas9 = at(9).mpas_mean_secs;
    let oracle_ratio = oracle9 / oracle5.max(1e-9);
    let mpas_ratio = mpas9 / mpas5.max(1e-9);
    assert!(
        oracle_ratio >= 5.0 * mpas_ratio,
        "oracle ratio {oracle_ratio:.1} not >= 5x search ratio {mpas_ratio:.1}"
    );
    // Neighborhood search grows faster than the area search with N.
    let ns_ratio = at(9).ns_mean_secs / at(5).ns_mean_secs.max(1e-9);
    println!(
        "criterion 8 (scaling): PASS — oracle x{oracle_ratio:.1} vs MPAS x{mpas_ratio:.1} (NS x{ns_ratio:.1}) from N=5 to N=9, {:.1}s",
        t0.elapsed().as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: case-study scale solves end to end.
// ---------------------------------------------------------------------------

#[test]
fn criterion_9_case_study_scale() {
    let t0 = Instant::now();
    // 13 customer ports, 5 ships, case-study ship envelope.
    let inst = generate(90_000, 14, 5);
    let y0 = Assignment::zeros(5, 13);
    let mut state = SearchState::new();
    let params = MpasParams { samples_per_iter: 10, stagnation: 10, seed: 90_000, ..Default::default() };
    let run = mpas_search(&inst, &y0, &SolverConfig::default(), &params, &mut state).unwrap();
    let audit = evaluate_fleet_plan(&inst, &run.best_plan).unwrap();
    assert!(audit.is_clean(), "{:?}", audit.violations);
    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 1800.0, "took {secs:.2}s, budget 30min");
    let sailing = run.best_plan.plans.iter().filter(|p| !p.chartered).count();
    println!(
        "criterion 9 (case-study scale): PASS — profit {:.0} with {sailing}/5 ships sailing, \
         {} evaluations in {secs:.1}s",
        run.best_h, run.evaluations
    );
}

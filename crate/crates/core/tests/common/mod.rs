//! Shared instance builders for the integration tests.
#![allow(dead_code)] // each test binary uses its own subset

use bunkerfleet_core::model::{Instance, Port, PriceSchedule, Ship};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn default_ship(id: usize) -> Ship {
    Ship {
        id,
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
    }
}

pub fn depot() -> Port {
    Port {
        id: 1,
        x: 0.0,
        y: 0.0,
        delivery_demand: 0.0,
        delivery_revenue: 0.0,
        pickup_demand: 0.0,
        pickup_revenue: 0.0,
        window_open: 0.0,
        window_close: 168.0,
        processing_time: 10.0,
        prices: PriceSchedule::single(677.5).unwrap(),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn customer(id: usize, x: f64, y: f64, del: f64, del_rev: f64, pick: f64, pick_rev: f64, close: f64) -> Port {
    Port {
        id,
        x,
        y,
        delivery_demand: del,
        delivery_revenue: del_rev,
        pickup_demand: pick,
        pickup_revenue: pick_rev,
        window_open: 0.0,
        window_close: close,
        processing_time: 10.0,
        prices: PriceSchedule::single(650.0).unwrap(),
    }
}

/// Random instance drawn from the ranges used across the experiment suite.
pub fn random_instance(seed: u64, customers: usize, ships: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ports = vec![depot()];
    for c in 0..customers {
        let demand = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(2000.0..4000.0) };
        ports.push(Port {
            id: c + 2,
            x: rng.gen_range(-10.0..10.0),
            y: rng.gen_range(-10.0..10.0),
            delivery_demand: demand(&mut rng),
            delivery_revenue: rng.gen_range(90.0..160.0),
            pickup_demand: demand(&mut rng),
            pickup_revenue: rng.gen_range(90.0..160.0),
            window_open: 0.0,
            window_close: rng.gen_range(40.0..170.0),
            processing_time: 10.0,
            prices: PriceSchedule::tiered(rng.gen_range(600.0..700.0), &[(300.0, 0.10), (600.0, 0.20)])
                .unwrap(),
        });
    }
    let fleet = (1..=ships).map(default_ship).collect();
    Instance::new(ports, fleet, 1.0, 100.0, None).unwrap()
}

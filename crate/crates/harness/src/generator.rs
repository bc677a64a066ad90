//! Seeded random instance generator.
//!
//! Ranges bracket the 7-port study fixture: coordinates uniform on the
//! [-10, 10]^2 grid (times 100 nm), each demand zero with probability 1/2 or
//! uniform in [2000, 4000] TEU, unit revenues uniform in [90, 160], base fuel
//! prices uniform in [600, 700] with 10%/20% discounts above 300/600 tons,
//! deadlines uniform in [40, 170] hours. Ships use the case-study envelope:
//! 5000 TEU, 1500 t tank, 14-24 knots, consumption constant 7.55e-7, with a
//! 2000 t lightweight, one-ton TEUs, 5% safety and minimum-batch fractions,
//! a 100k charter revenue and a 168 h cycle deadline.

use bunkerfleet_core::model::{Instance, Port, PriceSchedule, Ship};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SHIP: ShipParams = ShipParams {
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

#[derive(Debug, Clone, Copy)]
pub struct ShipParams {
    pub lightweight: f64,
    pub deadweight: f64,
    pub fuel_capacity: f64,
    pub min_bunker_fraction: f64,
    pub safety_fraction: f64,
    pub consumption_const: f64,
    pub charter_revenue: f64,
    pub cycle_deadline: f64,
    pub speed_min: f64,
    pub speed_max: f64,
}

impl ShipParams {
    fn build(&self, id: usize) -> Ship {
        Ship {
            id,
            lightweight: self.lightweight,
            deadweight: self.deadweight,
            fuel_capacity: self.fuel_capacity,
            min_bunker_fraction: self.min_bunker_fraction,
            safety_fraction: self.safety_fraction,
            consumption_const: self.consumption_const,
            charter_revenue: self.charter_revenue,
            cycle_deadline: self.cycle_deadline,
            speed_min: self.speed_min,
            speed_max: self.speed_max,
        }
    }
}

/// Generate one instance with `total_ports` ports (depot included) and
/// `ships` identical ships. Same seed, same instance.
pub fn generate(seed: u64, total_ports: usize, ships: usize) -> Instance {
    assert!(total_ports >= 3, "need the depot plus at least two customers");
    assert!(ships >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ports = Vec::with_capacity(total_ports);
    ports.push(Port {
        id: 1,
        x: 0.0,
        y: 0.0,
        delivery_demand: 0.0,
        delivery_revenue: 0.0,
        pickup_demand: 0.0,
        pickup_revenue: 0.0,
        window_open: 0.0,
        window_close: DEFAULT_SHIP.cycle_deadline,
        processing_time: 10.0,
        prices: PriceSchedule::single(rng.gen_range(600.0..700.0)).unwrap(),
    });
    for id in 2..=total_ports {
        let demand = |rng: &mut ChaCha8Rng| -> f64 {
            if rng.gen_bool(0.5) {
                0.0
            } else {
                rng.gen_range(2000.0..4000.0)
            }
        };
        ports.push(Port {
            id,
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
    let fleet: Vec<Ship> = (1..=ships).map(|id| DEFAULT_SHIP.build(id)).collect();
    Instance::new(ports, fleet, 1.0, 100.0, None).expect("generated instance must validate")
}

/// Generate a batch; instance `i` uses stream seed `base_seed + i`.
pub fn generate_batch(base_seed: u64, count: usize, total_ports: usize, ships: usize) -> Vec<Instance> {
    (0..count).map(|i| generate(base_seed + i as u64, total_ports, ships)).collect()
}

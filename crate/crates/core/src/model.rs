//! Domain types and the two physical laws of the model: displacement-dependent
//! fuel consumption and tiered fuel pricing.
//!
//! Conventions used throughout the crate:
//!
//! * Ports are indexed 0-based with the depot at index 0. The `id` field on
//!   [`Port`] carries the 1-based external id used in instance files.
//! * Distances are nautical miles, speeds knots, times hours, fuel and
//!   weights tons, cargo TEU.
//! * A ship's cycle starts and ends at the depot; fuel on board at the start
//!   must equal fuel on board at the end.

use std::fmt;

/// Errors from constructing or validating domain values.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// An operation was called outside its domain (negative volume, zero speed...).
    Domain(String),
    /// A type invariant does not hold for the given data.
    Invalid(String),
    /// Plan and instance shapes do not match (wrong ship count, port index out of range...).
    Shape(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Domain(m) => write!(f, "domain error: {m}"),
            ModelError::Invalid(m) => write!(f, "invalid data: {m}"),
            ModelError::Shape(m) => write!(f, "shape mismatch: {m}"),
        }
    }
}

impl std::error::Error for ModelError {}

/// One pricing tier: `unit_price` applies to volume bought inside this tier,
/// up to `upper_break` tons cumulative. The final tier is unbounded
/// (`upper_break = f64::INFINITY`).
#[derive(Debug, Clone, PartialEq)]
pub struct PriceTier {
    pub unit_price: f64,
    pub upper_break: f64,
}

/// Per-port incremental-discount fuel price schedule.
///
/// Unit prices are non-increasing across tiers and breakpoints strictly
/// increasing, so the induced cost function is piecewise linear, continuous
/// and concave with `cost(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSchedule {
    tiers: Vec<PriceTier>,
}

impl PriceSchedule {
    pub fn new(tiers: Vec<PriceTier>) -> Result<Self, ModelError> {
        if tiers.is_empty() {
            return Err(ModelError::Invalid("price schedule needs at least one tier".into()));
        }
        let mut prev_break = 0.0;
        let mut prev_price = f64::INFINITY;
        for (i, t) in tiers.iter().enumerate() {
            if !(t.unit_price >= 0.0) {
                return Err(ModelError::Invalid(format!("tier {i}: negative unit price")));
            }
            if t.unit_price > prev_price {
                return Err(ModelError::Invalid(format!(
                    "tier {i}: unit price {} increases over previous {}",
                    t.unit_price, prev_price
                )));
            }
            let is_last = i + 1 == tiers.len();
            if is_last {
                if t.upper_break.is_finite() {
                    return Err(ModelError::Invalid("final tier must be unbounded".into()));
                }
            } else if !(t.upper_break > prev_break) {
                return Err(ModelError::Invalid(format!(
                    "tier {i}: breakpoint {} not strictly increasing",
                    t.upper_break
                )));
            }
            prev_break = t.upper_break;
            prev_price = t.unit_price;
        }
        Ok(PriceSchedule { tiers })
    }

    /// Flat single-price schedule.
    pub fn single(price: f64) -> Result<Self, ModelError> {
        PriceSchedule::new(vec![PriceTier { unit_price: price, upper_break: f64::INFINITY }])
    }

    /// Convenience constructor: base price plus discounted tiers at the given
    /// breakpoints, e.g. `tiered(500.0, &[(300.0, 0.10), (600.0, 0.20)])` for
    /// 10% off above 300 t and 20% off above 600 t.
    pub fn tiered(base: f64, discounts: &[(f64, f64)]) -> Result<Self, ModelError> {
        let mut tiers = Vec::with_capacity(discounts.len() + 1);
        let mut upper = discounts.first().map_or(f64::INFINITY, |d| d.0);
        tiers.push(PriceTier { unit_price: base, upper_break: upper });
        for (i, (brk, disc)) in discounts.iter().enumerate() {
            debug_assert_eq!(*brk, upper);
            upper = discounts.get(i + 1).map_or(f64::INFINITY, |d| d.0);
            tiers.push(PriceTier { unit_price: base * (1.0 - disc), upper_break: upper });
        }
        PriceSchedule::new(tiers)
    }

    pub fn tiers(&self) -> &[PriceTier] {
        &self.tiers
    }

    /// Cost of buying `amount` tons under this schedule.
    pub fn cost(&self, amount: f64) -> f64 {
        debug_assert!(amount >= 0.0);
        let mut total = 0.0;
        let mut lower = 0.0;
        for t in &self.tiers {
            if amount <= lower {
                break;
            }
            let in_tier = amount.min(t.upper_break) - lower;
            total += t.unit_price * in_tier;
            lower = t.upper_break;
        }
        total
    }

    /// First-tier (undiscounted) unit price.
    pub fn base_price(&self) -> f64 {
        self.tiers[0].unit_price
    }

    /// Deepest-discount unit price (the last tier, since prices are non-increasing).
    pub fn cheapest_price(&self) -> f64 {
        self.tiers.last().unwrap().unit_price
    }
}

/// Fuel burned per nautical mile by a ship with consumption constant `c`,
/// displacement `weight` tons, cruising at `speed` knots: `c * weight * speed^2`.
///
/// Strictly increasing in both weight and speed; doubling the speed at fixed
/// weight quadruples the rate.
pub fn fuel_rate(c: f64, weight: f64, speed: f64) -> Result<f64, ModelError> {
    if !(weight > 0.0) {
        return Err(ModelError::Domain(format!("non-positive weight {weight}")));
    }
    if !(speed > 0.0) {
        return Err(ModelError::Domain(format!("non-positive speed {speed}")));
    }
    Ok(c * weight * speed * speed)
}

/// Cost of bunkering `amount` tons under `sched`. Errors on negative amounts.
pub fn bunker_cost(sched: &PriceSchedule, amount: f64) -> Result<f64, ModelError> {
    if !(amount >= 0.0) {
        return Err(ModelError::Domain(format!("negative bunker amount {amount}")));
    }
    Ok(sched.cost(amount))
}

/// A port. The depot is port index 0 and has zero demands.
#[derive(Debug, Clone, PartialEq)]
pub struct Port {
    /// 1-based external id as printed in instance files.
    pub id: usize,
    /// Coordinates in the instance's abstract grid; distances are the
    /// Euclidean coordinate distance times [`Instance::coord_scale`].
    pub x: f64,
    pub y: f64,
    /// Delivery demand (depot -> port), TEU.
    pub delivery_demand: f64,
    /// Revenue per TEU delivered.
    pub delivery_revenue: f64,
    /// Pickup demand (port -> depot), TEU.
    pub pickup_demand: f64,
    /// Revenue per TEU picked up.
    pub pickup_revenue: f64,
    /// Earliest allowed arrival, hours.
    pub window_open: f64,
    /// Latest allowed arrival (deadline), hours.
    pub window_close: f64,
    /// Fixed port processing time, hours.
    pub processing_time: f64,
    pub prices: PriceSchedule,
}

impl Port {
    fn validate(&self, is_depot: bool) -> Result<(), ModelError> {
        let ctx = format!("port {}", self.id);
        if !(self.delivery_demand >= 0.0 && self.pickup_demand >= 0.0) {
            return Err(ModelError::Invalid(format!("{ctx}: negative demand")));
        }
        if !(self.delivery_revenue >= 0.0 && self.pickup_revenue >= 0.0) {
            return Err(ModelError::Invalid(format!("{ctx}: negative revenue")));
        }
        if !(self.window_open <= self.window_close) {
            return Err(ModelError::Invalid(format!(
                "{ctx}: window_open {} > window_close {}",
                self.window_open, self.window_close
            )));
        }
        if !(self.processing_time >= 0.0) {
            return Err(ModelError::Invalid(format!("{ctx}: negative processing time")));
        }
        if is_depot && (self.delivery_demand != 0.0 || self.pickup_demand != 0.0) {
            return Err(ModelError::Invalid("depot must have zero demands".into()));
        }
        Ok(())
    }
}

/// A ship and its operating envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct Ship {
    /// 1-based external id.
    pub id: usize,
    /// Empty-ship displacement, tons.
    pub lightweight: f64,
    /// Fully-loaded displacement, tons; `deadweight - lightweight` bounds cargo weight.
    pub deadweight: f64,
    /// Fuel tank capacity, tons.
    pub fuel_capacity: f64,
    /// Minimum bunkering batch as a fraction of tank capacity.
    pub min_bunker_fraction: f64,
    /// Safety fuel level as a fraction of tank capacity; fuel on board never drops below it.
    pub safety_fraction: f64,
    /// Consumption constant of the fuel-rate law, ton / (ton * knot^2 * nm).
    pub consumption_const: f64,
    /// Revenue from chartering the ship out instead of operating it.
    pub charter_revenue: f64,
    /// Latest allowed return to the depot, hours.
    pub cycle_deadline: f64,
    pub speed_min: f64,
    pub speed_max: f64,
}

impl Ship {
    fn validate(&self) -> Result<(), ModelError> {
        let ctx = format!("ship {}", self.id);
        if !(self.lightweight > 0.0 && self.lightweight < self.deadweight) {
            return Err(ModelError::Invalid(format!(
                "{ctx}: need 0 < lightweight < deadweight, got {} / {}",
                self.lightweight, self.deadweight
            )));
        }
        if !(self.fuel_capacity > 0.0) {
            return Err(ModelError::Invalid(format!("{ctx}: non-positive fuel capacity")));
        }
        if !(self.min_bunker_fraction > 0.0 && self.min_bunker_fraction <= 1.0) {
            return Err(ModelError::Invalid(format!("{ctx}: min bunker fraction out of (0,1]")));
        }
        if !(self.safety_fraction >= 0.0 && self.safety_fraction < 1.0) {
            return Err(ModelError::Invalid(format!("{ctx}: safety fraction out of [0,1)")));
        }
        if !(self.speed_min > 0.0 && self.speed_min <= self.speed_max) {
            return Err(ModelError::Invalid(format!(
                "{ctx}: need 0 < speed_min <= speed_max, got {} / {}",
                self.speed_min, self.speed_max
            )));
        }
        if !(self.consumption_const >= 0.0) {
            return Err(ModelError::Invalid(format!("{ctx}: negative consumption constant")));
        }
        if !(self.charter_revenue >= 0.0) {
            return Err(ModelError::Invalid(format!("{ctx}: negative charter revenue")));
        }
        if !(self.cycle_deadline > 0.0) {
            return Err(ModelError::Invalid(format!("{ctx}: non-positive cycle deadline")));
        }
        Ok(())
    }

    /// Cargo capacity in TEU given the fleet-wide unit weight.
    pub fn cargo_capacity(&self, unit_weight: f64) -> f64 {
        (self.deadweight - self.lightweight) / unit_weight
    }

    /// Minimum bunkering batch, tons.
    pub fn min_bunker(&self) -> f64 {
        self.min_bunker_fraction * self.fuel_capacity
    }

    /// Safety fuel level, tons.
    pub fn safety_fuel(&self) -> f64 {
        self.safety_fraction * self.fuel_capacity
    }

    /// Fuel burned per nautical mile at the given displacement and speed.
    pub fn burn_rate(&self, weight: f64, speed: f64) -> f64 {
        debug_assert!(weight > 0.0 && speed > 0.0);
        self.consumption_const * weight * speed * speed
    }
}

/// Immutable world description: ports (depot first), ships, the cargo unit
/// weight and the port-to-port distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    ports: Vec<Port>,
    ships: Vec<Ship>,
    cargo_unit_weight: f64,
    coord_scale: f64,
    /// Row-major N x N symmetric distance matrix, nautical miles.
    distances: Vec<f64>,
}

/// Relative tolerance for symmetry / triangle-inequality validation.
const DIST_TOL: f64 = 1e-9;

impl Instance {
    /// Build an instance, computing distances as Euclidean coordinate distance
    /// times `coord_scale` unless an explicit matrix is supplied (for real sea
    /// distances). Validates every type invariant.
    pub fn new(
        ports: Vec<Port>,
        ships: Vec<Ship>,
        cargo_unit_weight: f64,
        coord_scale: f64,
        explicit_distances: Option<Vec<f64>>,
    ) -> Result<Self, ModelError> {
        let n = ports.len();
        if n < 2 {
            return Err(ModelError::Invalid("need the depot plus at least one customer port".into()));
        }
        if ships.is_empty() {
            return Err(ModelError::Invalid("need at least one ship".into()));
        }
        if !(cargo_unit_weight > 0.0) {
            return Err(ModelError::Invalid("cargo unit weight must be positive".into()));
        }
        if !(coord_scale > 0.0) {
            return Err(ModelError::Invalid("coordinate scale must be positive".into()));
        }
        for (i, p) in ports.iter().enumerate() {
            p.validate(i == 0)?;
        }
        for s in &ships {
            s.validate()?;
        }
        let distances = match explicit_distances {
            Some(d) => {
                if d.len() != n * n {
                    return Err(ModelError::Shape(format!(
                        "distance matrix has {} entries, expected {}",
                        d.len(),
                        n * n
                    )));
                }
                d
            }
            None => {
                let mut d = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        let dx = ports[i].x - ports[j].x;
                        let dy = ports[i].y - ports[j].y;
                        d[i * n + j] = coord_scale * (dx * dx + dy * dy).sqrt();
                    }
                }
                d
            }
        };
        let inst = Instance { ports, ships, cargo_unit_weight, coord_scale, distances };
        inst.validate_distances()?;
        Ok(inst)
    }

    fn validate_distances(&self) -> Result<(), ModelError> {
        let n = self.num_ports();
        let scale = |v: f64| DIST_TOL * (1.0 + v.abs());
        for i in 0..n {
            if self.distance(i, i) != 0.0 {
                return Err(ModelError::Invalid(format!("distance ({i},{i}) must be zero")));
            }
            for j in 0..n {
                let dij = self.distance(i, j);
                if !(dij >= 0.0) || !dij.is_finite() {
                    return Err(ModelError::Invalid(format!("distance ({i},{j}) = {dij}")));
                }
                if (dij - self.distance(j, i)).abs() > scale(dij) {
                    return Err(ModelError::Invalid(format!("distance matrix asymmetric at ({i},{j})")));
                }
            }
        }
        // Triangle inequality, required by the dead-port refinement argument.
        for i in 0..n {
            for k in 0..n {
                let dik = self.distance(i, k);
                for j in 0..n {
                    if dik > self.distance(i, j) + self.distance(j, k) + scale(dik) {
                        return Err(ModelError::Invalid(format!(
                            "triangle inequality violated: d({i},{k}) > d({i},{j}) + d({j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn num_ports(&self) -> usize {
        self.ports.len()
    }

    /// Number of customer ports (everything but the depot).
    pub fn num_customers(&self) -> usize {
        self.ports.len() - 1
    }

    pub fn num_ships(&self) -> usize {
        self.ships.len()
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    pub fn ships(&self) -> &[Ship] {
        &self.ships
    }

    /// Port by 0-based index; the depot is index 0.
    pub fn port(&self, idx: usize) -> &Port {
        &self.ports[idx]
    }

    pub fn ship(&self, idx: usize) -> &Ship {
        &self.ships[idx]
    }

    pub fn cargo_unit_weight(&self) -> f64 {
        self.cargo_unit_weight
    }

    pub fn coord_scale(&self) -> f64 {
        self.coord_scale
    }

    /// Distance between ports `i` and `j` (0-based), nautical miles.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.ports.len() + j]
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }
}

/// Binary matrix assigning customer ports to ships: bit `(k, c)` is set iff
/// customer `c` (port index `c + 1`) is assigned to ship `k`.
///
/// Flattened digit order is ship-major: digits `k * customers .. (k+1) * customers`
/// belong to ship `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    ships: usize,
    customers: usize,
    words: Vec<u64>,
}

impl Assignment {
    pub fn zeros(ships: usize, customers: usize) -> Self {
        let bits = ships * customers;
        Assignment { ships, customers, words: vec![0; bits.div_ceil(64)] }
    }

    pub fn num_ships(&self) -> usize {
        self.ships
    }

    pub fn num_customers(&self) -> usize {
        self.customers
    }

    pub fn num_bits(&self) -> usize {
        self.ships * self.customers
    }

    #[inline]
    fn pos(&self, ship: usize, customer: usize) -> usize {
        debug_assert!(ship < self.ships && customer < self.customers);
        ship * self.customers + customer
    }

    #[inline]
    pub fn get(&self, ship: usize, customer: usize) -> bool {
        self.get_bit(self.pos(ship, customer))
    }

    #[inline]
    pub fn get_bit(&self, bit: usize) -> bool {
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn set(&mut self, ship: usize, customer: usize, value: bool) {
        self.set_bit(self.pos(ship, customer), value);
    }

    pub fn set_bit(&mut self, bit: usize, value: bool) {
        debug_assert!(bit < self.num_bits());
        if value {
            self.words[bit / 64] |= 1 << (bit % 64);
        } else {
            self.words[bit / 64] &= !(1 << (bit % 64));
        }
    }

    pub fn flip_bit(&mut self, bit: usize) {
        debug_assert!(bit < self.num_bits());
        self.words[bit / 64] ^= 1 << (bit % 64);
    }

    /// A copy with one digit flipped.
    pub fn with_flipped(&self, bit: usize) -> Self {
        let mut out = self.clone();
        out.flip_bit(bit);
        out
    }

    pub fn same_shape(&self, other: &Assignment) -> bool {
        self.ships == other.ships && self.customers == other.customers
    }

    /// Customer port indices (into `Instance::ports`) assigned to `ship`.
    pub fn ports_of_ship(&self, ship: usize) -> Vec<usize> {
        (0..self.customers).filter(|&c| self.get(ship, c)).map(|c| c + 1).collect()
    }

    /// Parse from a flattened digit string such as `"0110"`.
    pub fn from_bit_string(ships: usize, customers: usize, s: &str) -> Result<Self, ModelError> {
        let digits: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if digits.len() != ships * customers {
            return Err(ModelError::Shape(format!(
                "assignment string has {} digits, expected {}",
                digits.len(),
                ships * customers
            )));
        }
        let mut a = Assignment::zeros(ships, customers);
        for (i, d) in digits.iter().enumerate() {
            match d {
                '0' => {}
                '1' => a.set_bit(i, true),
                _ => return Err(ModelError::Invalid(format!("assignment digit '{d}'"))),
            }
        }
        Ok(a)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in 0..self.num_bits() {
            write!(f, "{}", if self.get_bit(bit) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Number of differing digits between two assignments; a metric on the
/// assignment space. Errors on shape mismatch.
pub fn hamming(a: &Assignment, b: &Assignment) -> Result<usize, ModelError> {
    if !a.same_shape(b) {
        return Err(ModelError::Shape(format!(
            "assignments {}x{} vs {}x{}",
            a.ships, a.customers, b.ships, b.customers
        )));
    }
    Ok(a.words.iter().zip(&b.words).map(|(x, y)| (x ^ y).count_ones() as usize).sum())
}

/// One port call in a ship plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Visit {
    /// 0-based port index; the first and last visit of a sailing ship are the depot.
    pub port: usize,
    /// Quantity delivered at this port, TEU.
    pub delivery: f64,
    /// Quantity picked up at this port, TEU.
    pub pickup: f64,
    /// Whether the ship bunkers here.
    pub bunker: bool,
    /// Fuel bought here, tons.
    pub bunker_amount: f64,
    /// Arrival time, hours from cycle start.
    pub arrival: f64,
    /// Fuel on board when entering the port, tons.
    pub fuel_on_entry: f64,
    /// Displacement when leaving the port, tons.
    pub weight_on_departure: f64,
}

/// One sailed voyage between consecutive visits.
#[derive(Debug, Clone, PartialEq)]
pub struct Leg {
    pub from: usize,
    pub to: usize,
    /// Cruise speed, knots; constant within the leg.
    pub speed: f64,
}

/// One ship's full decision record.
#[derive(Debug, Clone, PartialEq)]
pub struct ShipPlan {
    /// Chartered-out ships stay at the depot and earn the charter revenue.
    pub chartered: bool,
    pub visits: Vec<Visit>,
    pub legs: Vec<Leg>,
}

impl ShipPlan {
    pub fn charter() -> Self {
        ShipPlan { chartered: true, visits: Vec::new(), legs: Vec::new() }
    }

    /// Port indices of the customer calls, in visit order.
    pub fn customer_ports(&self) -> impl Iterator<Item = usize> + '_ {
        self.visits.iter().map(|v| v.port).filter(|&p| p != 0)
    }
}

/// Per-ship plans plus the audited fleet profit.
#[derive(Debug, Clone, PartialEq)]
pub struct FleetPlan {
    pub plans: Vec<ShipPlan>,
    pub per_ship_profit: Vec<f64>,
    pub total_profit: f64,
}

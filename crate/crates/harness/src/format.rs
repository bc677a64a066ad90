//! Plain-text instance and plan files.
//!
//! Both formats are line-based, whitespace-tokenized, self-describing and
//! deterministic: ports and ships are emitted in ascending id order and
//! numbers use Rust's shortest round-trip float formatting, so
//! `load(emit(x))` reproduces `x` exactly.
//!
//! Instance schema (`*.inst`):
//!
//! ```text
//! version 1
//! cargo_unit_weight_tons 1
//! coord_scale_nm 100
//! ports 7
//! port 1 xy 0 0 delivery 0 rev 0 pickup 0 rev 0 window 0 168 process 10 prices 677.5
//! port 2 xy -8 2 delivery 0 rev 130 pickup 3600 rev 127 window 0 120 process 10 prices 629
//! ...
//! ships 2
//! ship 1 lightweight_tons 2000 deadweight_tons 7000 fuel_capacity_tons 1500 \
//!        min_bunker_frac 0.05 safety_frac 0.05 consumption 7.55e-7 \
//!        charter_revenue 100000 cycle_deadline_hours 168 speed_knots 14 24
//! distances euclid            (or `distances explicit` followed by N rows)
//! ```
//!
//! Price tiers are space-separated `price@upper_break` tokens with a bare
//! `price` for the final unbounded tier, e.g. `prices 660@300 594@600 528`.
//! Port ids must be `1..N` in order with the depot first. Ship lines are one
//! logical line (no continuations); the backslashes above are for readability
//! here only.
//!
//! Plan schema (`*.plan` / `plan.txt`):
//!
//! ```text
//! version 1
//! fleet_profit 352799.73
//! ships 2
//! ship 1 sails profit 252799.73 visits 3
//! visit 1 arrive 0 deliver 0 pickup 0 bunker 1 amount 554.77 fuel 267.37 weight 2600
//! leg 1 2 speed 20
//! visit 2 arrive 35 deliver 600 pickup 400 bunker 0 amount 0 fuel 629.77 weight 2400
//! leg 2 1 speed 20
//! visit 1 arrive 70 deliver 0 pickup 0 bunker 0 amount 0 fuel 267.37 weight 2400
//! ship 2 chartered profit 100000
//! ```

use anyhow::{anyhow, bail, Context, Result};
use bunkerfleet_core::model::{
    FleetPlan, Instance, Leg, Port, PriceSchedule, PriceTier, Ship, ShipPlan, Visit,
};
use std::fmt::Write as _;
use std::path::Path;

struct Lines<'a> {
    tokens: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let tokens = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
            .filter(|(_, toks)| !toks.is_empty() && !toks[0].starts_with('#'))
            .collect();
        Lines { tokens, pos: 0 }
    }

    fn next(&mut self) -> Option<(usize, &[&'a str])> {
        let item = self.tokens.get(self.pos)?;
        self.pos += 1;
        Some((item.0, &item.1))
    }

    fn expect(&mut self, keyword: &str) -> Result<(usize, Vec<&'a str>)> {
        match self.next() {
            Some((n, toks)) if toks[0] == keyword => Ok((n, toks.to_vec())),
            Some((n, toks)) => bail!("line {n}: expected '{keyword}', found '{}'", toks[0]),
            None => bail!("unexpected end of file, expected '{keyword}'"),
        }
    }
}

fn num(tok: &str, line: usize, field: &str) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| anyhow!("line {line}: field '{field}': bad number '{tok}'"))
}

fn nat(tok: &str, line: usize, field: &str) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| anyhow!("line {line}: field '{field}': bad integer '{tok}'"))
}

fn parse_prices(tokens: &[&str], line: usize) -> Result<PriceSchedule> {
    if tokens.is_empty() {
        bail!("line {line}: field 'prices': at least one tier required");
    }
    let mut tiers = Vec::with_capacity(tokens.len());
    for (i, tok) in tokens.iter().enumerate() {
        let is_last = i + 1 == tokens.len();
        let (price, upper) = match tok.split_once('@') {
            Some((p, b)) => (num(p, line, "prices")?, num(b, line, "prices")?),
            None => {
                if !is_last {
                    bail!("line {line}: field 'prices': only the final tier may omit '@break'");
                }
                (num(tok, line, "prices")?, f64::INFINITY)
            }
        };
        if is_last && upper.is_finite() {
            bail!("line {line}: field 'prices': final tier must be unbounded");
        }
        tiers.push(PriceTier { unit_price: price, upper_break: upper });
    }
    PriceSchedule::new(tiers).map_err(|e| anyhow!("line {line}: {e}"))
}

fn fmt_prices(s: &PriceSchedule) -> String {
    let mut out = String::new();
    for (i, t) in s.tiers().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        if t.upper_break.is_finite() {
            let _ = write!(out, "{}@{}", t.unit_price, t.upper_break);
        } else {
            let _ = write!(out, "{}", t.unit_price);
        }
    }
    out
}

/// Keyword-tagged field walker: `walk(&["xy", ...])` returns the value tokens
/// following each keyword in order.
fn tagged<'a>(toks: &[&'a str], line: usize, spec: &[(&str, usize)]) -> Result<Vec<Vec<&'a str>>> {
    let mut out = Vec::with_capacity(spec.len());
    let mut i = 0;
    for (kw, arity) in spec {
        if i >= toks.len() || toks[i] != *kw {
            bail!(
                "line {line}: expected field '{kw}'{}",
                toks.get(i).map(|t| format!(", found '{t}'")).unwrap_or_default()
            );
        }
        i += 1;
        let take = if *arity == usize::MAX { toks.len() - i } else { *arity };
        if i + take > toks.len() {
            bail!("line {line}: field '{kw}' needs {take} value(s)");
        }
        out.push(toks[i..i + take].to_vec());
        i += take;
    }
    if i != toks.len() {
        bail!("line {line}: trailing tokens starting at '{}'", toks[i]);
    }
    Ok(out)
}

/// Parse an instance document. Schema violations name the field and line;
/// invariant violations name the broken constraint.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = Lines::new(text);
    let (n1, v) = lines.expect("version")?;
    if v.get(1) != Some(&"1") {
        bail!("line {n1}: unsupported format version");
    }
    let (n2, w) = lines.expect("cargo_unit_weight_tons")?;
    let unit_weight = num(w.get(1).copied().unwrap_or(""), n2, "cargo_unit_weight_tons")?;
    let (n3, s) = lines.expect("coord_scale_nm")?;
    let coord_scale = num(s.get(1).copied().unwrap_or(""), n3, "coord_scale_nm")?;
    let (n4, p) = lines.expect("ports")?;
    let n_ports = nat(p.get(1).copied().unwrap_or(""), n4, "ports")?;

    let mut ports = Vec::with_capacity(n_ports);
    for want in 1..=n_ports {
        let (ln, toks) = lines.expect("port")?;
        let id = nat(toks.get(1).copied().unwrap_or(""), ln, "port id")?;
        if id != want {
            bail!("line {ln}: port ids must run 1..{n_ports} in order (depot must be port 1), found {id}");
        }
        let fields = tagged(
            &toks[2..],
            ln,
            &[
                ("xy", 2),
                ("delivery", 1),
                ("rev", 1),
                ("pickup", 1),
                ("rev", 1),
                ("window", 2),
                ("process", 1),
                ("prices", usize::MAX),
            ],
        )?;
        ports.push(Port {
            id,
            x: num(fields[0][0], ln, "xy")?,
            y: num(fields[0][1], ln, "xy")?,
            delivery_demand: num(fields[1][0], ln, "delivery")?,
            delivery_revenue: num(fields[2][0], ln, "rev")?,
            pickup_demand: num(fields[3][0], ln, "pickup")?,
            pickup_revenue: num(fields[4][0], ln, "rev")?,
            window_open: num(fields[5][0], ln, "window")?,
            window_close: num(fields[5][1], ln, "window")?,
            processing_time: num(fields[6][0], ln, "process")?,
            prices: parse_prices(&fields[7], ln)?,
        });
    }

    let (n5, s) = lines.expect("ships")?;
    let n_ships = nat(s.get(1).copied().unwrap_or(""), n5, "ships")?;
    let mut ships = Vec::with_capacity(n_ships);
    for want in 1..=n_ships {
        let (ln, toks) = lines.expect("ship")?;
        let id = nat(toks.get(1).copied().unwrap_or(""), ln, "ship id")?;
        if id != want {
            bail!("line {ln}: ship ids must run 1..{n_ships} in order, found {id}");
        }
        let fields = tagged(
            &toks[2..],
            ln,
            &[
                ("lightweight_tons", 1),
                ("deadweight_tons", 1),
                ("fuel_capacity_tons", 1),
                ("min_bunker_frac", 1),
                ("safety_frac", 1),
                ("consumption", 1),
                ("charter_revenue", 1),
                ("cycle_deadline_hours", 1),
                ("speed_knots", 2),
            ],
        )?;
        ships.push(Ship {
            id,
            lightweight: num(fields[0][0], ln, "lightweight_tons")?,
            deadweight: num(fields[1][0], ln, "deadweight_tons")?,
            fuel_capacity: num(fields[2][0], ln, "fuel_capacity_tons")?,
            min_bunker_fraction: num(fields[3][0], ln, "min_bunker_frac")?,
            safety_fraction: num(fields[4][0], ln, "safety_frac")?,
            consumption_const: num(fields[5][0], ln, "consumption")?,
            charter_revenue: num(fields[6][0], ln, "charter_revenue")?,
            cycle_deadline: num(fields[7][0], ln, "cycle_deadline_hours")?,
            speed_min: num(fields[8][0], ln, "speed_knots")?,
            speed_max: num(fields[8][1], ln, "speed_knots")?,
        });
    }

    let (n6, d) = lines.expect("distances")?;
    let explicit = match d.get(1).copied() {
        Some("euclid") => None,
        Some("explicit") => {
            let mut m = Vec::with_capacity(n_ports * n_ports);
            for _ in 0..n_ports {
                let (ln, row) = lines.expect("row")?;
                if row.len() != n_ports + 1 {
                    bail!("line {ln}: distance row needs {n_ports} values");
                }
                for tok in &row[1..] {
                    m.push(num(tok, ln, "row")?);
                }
            }
            Some(m)
        }
        other => bail!("line {n6}: distances must be 'euclid' or 'explicit', found {other:?}"),
    };

    Instance::new(ports, ships, unit_weight, coord_scale, explicit)
        .map_err(|e| anyhow!("instance invariant: {e}"))
}

/// Load an instance file.
pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading instance file {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Serialize an instance; `load(emit(x))` reproduces `x` exactly.
pub fn emit_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# bunkerfleet instance");
    let _ = writeln!(out, "version 1");
    let _ = writeln!(out, "cargo_unit_weight_tons {}", inst.cargo_unit_weight());
    let _ = writeln!(out, "coord_scale_nm {}", inst.coord_scale());
    let _ = writeln!(out, "ports {}", inst.num_ports());
    for p in inst.ports() {
        let _ = writeln!(
            out,
            "port {} xy {} {} delivery {} rev {} pickup {} rev {} window {} {} process {} prices {}",
            p.id,
            p.x,
            p.y,
            p.delivery_demand,
            p.delivery_revenue,
            p.pickup_demand,
            p.pickup_revenue,
            p.window_open,
            p.window_close,
            p.processing_time,
            fmt_prices(&p.prices),
        );
    }
    let _ = writeln!(out, "ships {}", inst.num_ships());
    for s in inst.ships() {
        let _ = writeln!(
            out,
            "ship {} lightweight_tons {} deadweight_tons {} fuel_capacity_tons {} min_bunker_frac {} \
             safety_frac {} consumption {} charter_revenue {} cycle_deadline_hours {} speed_knots {} {}",
            s.id,
            s.lightweight,
            s.deadweight,
            s.fuel_capacity,
            s.min_bunker_fraction,
            s.safety_fraction,
            s.consumption_const,
            s.charter_revenue,
            s.cycle_deadline,
            s.speed_min,
            s.speed_max,
        );
    }
    // Emit the matrix only when it differs from the coordinate-derived one.
    let n = inst.num_ports();
    let mut euclid = true;
    'check: for i in 0..n {
        for j in 0..n {
            let dx = inst.port(i).x - inst.port(j).x;
            let dy = inst.port(i).y - inst.port(j).y;
            if inst.distance(i, j) != inst.coord_scale() * (dx * dx + dy * dy).sqrt() {
                euclid = false;
                break 'check;
            }
        }
    }
    if euclid {
        let _ = writeln!(out, "distances euclid");
    } else {
        let _ = writeln!(out, "distances explicit");
        for i in 0..n {
            let _ = write!(out, "row");
            for j in 0..n {
                let _ = write!(out, " {}", inst.distance(i, j));
            }
            let _ = writeln!(out);
        }
    }
    out
}

pub fn write_instance(inst: &Instance, path: &Path) -> Result<()> {
    std::fs::write(path, emit_instance(inst))
        .with_context(|| format!("writing instance file {}", path.display()))
}

/// Serialize a fleet plan.
pub fn emit_plan(plan: &FleetPlan) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# bunkerfleet plan");
    let _ = writeln!(out, "version 1");
    let _ = writeln!(out, "fleet_profit {}", plan.total_profit);
    let _ = writeln!(out, "ships {}", plan.plans.len());
    for (k, sp) in plan.plans.iter().enumerate() {
        if sp.chartered {
            let _ = writeln!(out, "ship {} chartered profit {}", k + 1, plan.per_ship_profit[k]);
            continue;
        }
        let _ = writeln!(
            out,
            "ship {} sails profit {} visits {}",
            k + 1,
            plan.per_ship_profit[k],
            sp.visits.len()
        );
        for (i, v) in sp.visits.iter().enumerate() {
            let _ = writeln!(
                out,
                "visit {} arrive {} deliver {} pickup {} bunker {} amount {} fuel {} weight {}",
                v.port + 1,
                v.arrival,
                v.delivery,
                v.pickup,
                if v.bunker { 1 } else { 0 },
                v.bunker_amount,
                v.fuel_on_entry,
                v.weight_on_departure,
            );
            if i < sp.legs.len() {
                let leg = &sp.legs[i];
                let _ = writeln!(out, "leg {} {} speed {}", leg.from + 1, leg.to + 1, leg.speed);
            }
        }
    }
    out
}

/// Parse a plan document.
pub fn parse_plan(text: &str) -> Result<FleetPlan> {
    let mut lines = Lines::new(text);
    let (n1, v) = lines.expect("version")?;
    if v.get(1) != Some(&"1") {
        bail!("line {n1}: unsupported plan version");
    }
    let (n2, fp) = lines.expect("fleet_profit")?;
    let total_profit = num(fp.get(1).copied().unwrap_or(""), n2, "fleet_profit")?;
    let (n3, sh) = lines.expect("ships")?;
    let n_ships = nat(sh.get(1).copied().unwrap_or(""), n3, "ships")?;

    let mut plans = Vec::with_capacity(n_ships);
    let mut per_ship = Vec::with_capacity(n_ships);
    for want in 1..=n_ships {
        let (ln, toks) = lines.expect("ship")?;
        let id = nat(toks.get(1).copied().unwrap_or(""), ln, "ship id")?;
        if id != want {
            bail!("line {ln}: ship ids must run 1..{n_ships} in order, found {id}");
        }
        match toks.get(2).copied() {
            Some("chartered") => {
                let fields = tagged(&toks[3..], ln, &[("profit", 1)])?;
                per_ship.push(num(fields[0][0], ln, "profit")?);
                plans.push(ShipPlan::charter());
            }
            Some("sails") => {
                let fields = tagged(&toks[3..], ln, &[("profit", 1), ("visits", 1)])?;
                per_ship.push(num(fields[0][0], ln, "profit")?);
                let n_visits = nat(fields[1][0], ln, "visits")?;
                let mut visits = Vec::with_capacity(n_visits);
                let mut legs = Vec::with_capacity(n_visits.saturating_sub(1));
                for vi in 0..n_visits {
                    let (vl, vt) = lines.expect("visit")?;
                    let port = nat(vt.get(1).copied().unwrap_or(""), vl, "visit port")?;
                    if port == 0 {
                        bail!("line {vl}: port ids are 1-based");
                    }
                    let f = tagged(
                        &vt[2..],
                        vl,
                        &[
                            ("arrive", 1),
                            ("deliver", 1),
                            ("pickup", 1),
                            ("bunker", 1),
                            ("amount", 1),
                            ("fuel", 1),
                            ("weight", 1),
                        ],
                    )?;
                    visits.push(Visit {
                        port: port - 1,
                        arrival: num(f[0][0], vl, "arrive")?,
                        delivery: num(f[1][0], vl, "deliver")?,
                        pickup: num(f[2][0], vl, "pickup")?,
                        bunker: f[3][0] == "1",
                        bunker_amount: num(f[4][0], vl, "amount")?,
                        fuel_on_entry: num(f[5][0], vl, "fuel")?,
                        weight_on_departure: num(f[6][0], vl, "weight")?,
                    });
                    if vi + 1 < n_visits {
                        let (ll, lt) = lines.expect("leg")?;
                        let from = nat(lt.get(1).copied().unwrap_or(""), ll, "leg from")?;
                        let to = nat(lt.get(2).copied().unwrap_or(""), ll, "leg to")?;
                        if from == 0 || to == 0 {
                            bail!("line {ll}: port ids are 1-based");
                        }
                        let f = tagged(&lt[3..], ll, &[("speed", 1)])?;
                        legs.push(Leg { from: from - 1, to: to - 1, speed: num(f[0][0], ll, "speed")? });
                    }
                }
                plans.push(ShipPlan { chartered: false, visits, legs });
            }
            other => bail!("line {ln}: ship must be 'chartered' or 'sails', found {other:?}"),
        }
    }
    Ok(FleetPlan { plans, per_ship_profit: per_ship, total_profit })
}

pub fn load_plan(path: &Path) -> Result<FleetPlan> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading plan file {}", path.display()))?;
    parse_plan(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_plan(plan: &FleetPlan, path: &Path) -> Result<()> {
    std::fs::write(path, emit_plan(plan)).with_context(|| format!("writing plan file {}", path.display()))
}

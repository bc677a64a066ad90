//! Instance and plan file round-trips, fixture values, and parser errors.

use bunkerfleet_harness::format::{
    emit_instance, emit_plan, load_instance, parse_instance, parse_plan,
};
use bunkerfleet_harness::generator::generate;
use std::path::Path;

fn fixture_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/table3.inst")
}

#[test]
fn table3_fixture_matches_the_published_rows() {
    let inst = load_instance(&fixture_path()).unwrap();
    assert_eq!(inst.num_ports(), 7);
    assert_eq!(inst.num_ships(), 2);
    let p2 = inst.port(1);
    assert_eq!((p2.x, p2.y), (-8.0, 2.0));
    assert_eq!(p2.pickup_demand, 3600.0);
    assert_eq!(p2.pickup_revenue, 127.0);
    assert_eq!(p2.window_close, 120.0);
    assert_eq!(p2.prices.base_price(), 629.0);
    let p5 = inst.port(4);
    assert_eq!((p5.x, p5.y), (4.7, -3.0));
    assert_eq!(p5.delivery_demand, 2700.0);
    assert_eq!(p5.window_close, 40.0);
    assert_eq!(p5.prices.base_price(), 630.0);
    // Distances are Euclidean on the x100 grid.
    assert!((inst.distance(0, 2) - 1000.0).abs() < 1e-9);
    assert!((inst.distance(0, 1) - 100.0 * 68f64.sqrt()).abs() < 1e-9);
}

#[test]
fn instance_round_trip_is_identity() {
    for seed in [1u64, 9, 101] {
        let inst = generate(seed, 6, 2);
        let text = emit_instance(&inst);
        let back = parse_instance(&text).unwrap();
        assert_eq!(inst, back, "seed {seed}");
        // And a second emission is byte-identical.
        assert_eq!(text, emit_instance(&back));
    }
}

#[test]
fn explicit_matrix_round_trips() {
    let inst = generate(3, 5, 1);
    let text = emit_instance(&inst);
    let reparsed = parse_instance(&text).unwrap();
    // Force an explicit matrix by perturbing one symmetric pair.
    let mut m = reparsed.distances().to_vec();
    let n = reparsed.num_ports();
    m[1] += 5.0;
    m[n] += 5.0;
    let explicit = bunkerfleet_core::model::Instance::new(
        reparsed.ports().to_vec(),
        reparsed.ships().to_vec(),
        reparsed.cargo_unit_weight(),
        reparsed.coord_scale(),
        Some(m),
    )
    .unwrap();
    let text2 = emit_instance(&explicit);
    assert!(text2.contains("distances explicit"));
    assert_eq!(parse_instance(&text2).unwrap(), explicit);
}

#[test]
fn plan_round_trip_is_identity() {
    use bunkerfleet_core::model::Assignment;
    use bunkerfleet_core::search::evaluate_assignment;
    use bunkerfleet_core::singleship::SolverConfig;
    let inst = generate(8, 5, 2);
    let mut y = Assignment::zeros(2, 4);
    y.set(0, 0, true);
    y.set(0, 2, true);
    y.set(1, 1, true);
    let (_, plan) = evaluate_assignment(&inst, &y, &SolverConfig::default()).unwrap();
    let text = emit_plan(&plan);
    let back = parse_plan(&text).unwrap();
    assert_eq!(plan, back);
    assert_eq!(text, emit_plan(&back));
}

#[test]
fn missing_depot_is_named() {
    let text = "version 1\ncargo_unit_weight_tons 1\ncoord_scale_nm 100\nports 2\n\
                port 2 xy 1 1 delivery 0 rev 0 pickup 0 rev 0 window 0 10 process 1 prices 500\n";
    let err = parse_instance(text).unwrap_err().to_string();
    assert!(err.contains("depot must be port 1"), "{err}");
}

#[test]
fn asymmetric_matrix_is_rejected() {
    let inst = generate(4, 4, 1);
    let mut text = emit_instance(&inst);
    text = text.replace("distances euclid", "distances explicit");
    let n = inst.num_ports();
    for i in 0..n {
        let mut row = String::from("row");
        for j in 0..n {
            let mut d = inst.distance(i, j);
            if i == 0 && j == 1 {
                d += 100.0; // break symmetry
            }
            row.push_str(&format!(" {d}"));
        }
        text.push_str(&row);
        text.push('\n');
    }
    let err = parse_instance(&text).unwrap_err().to_string();
    assert!(err.contains("asymmetric"), "{err}");
}

#[test]
fn bad_field_names_line_and_field() {
    let text = "version 1\ncargo_unit_weight_tons 1\ncoord_scale_nm 100\nports 1\n\
                port 1 xy 0 zero delivery 0 rev 0 pickup 0 rev 0 window 0 10 process 1 prices 500\n";
    let err = parse_instance(text).unwrap_err().to_string();
    assert!(err.contains("line 5") && err.contains("xy"), "{err}");
}

#[test]
fn price_tiers_parse_and_validate() {
    let base = "version 1\ncargo_unit_weight_tons 1\ncoord_scale_nm 100\nports 2\n\
                port 1 xy 0 0 delivery 0 rev 0 pickup 0 rev 0 window 0 10 process 1 prices 500\n\
                port 2 xy 1 0 delivery 0 rev 0 pickup 0 rev 0 window 0 10 process 1 prices PRICES\n\
                ships 1\n\
                ship 1 lightweight_tons 2000 deadweight_tons 7000 fuel_capacity_tons 1500 \
                min_bunker_frac 0.05 safety_frac 0.05 consumption 7.55e-7 charter_revenue 1 \
                cycle_deadline_hours 168 speed_knots 14 24\ndistances euclid\n";
    let good = base.replace("PRICES", "660@300 594@600 528");
    let inst = parse_instance(&good).unwrap();
    assert_eq!(inst.port(1).prices.tiers().len(), 3);
    assert_eq!(inst.port(1).prices.cheapest_price(), 528.0);

    let increasing = base.replace("PRICES", "500@300 600");
    assert!(parse_instance(&increasing).is_err());
    let bounded_last = base.replace("PRICES", "500@300");
    assert!(parse_instance(&bounded_last).is_err());
}

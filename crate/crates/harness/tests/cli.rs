//! End-to-end CLI behavior: exit codes, output files, reproducibility.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> PathBuf {
    Path::new(env!("CARGO_BIN_EXE_bunkerfleet")).to_path_buf()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(bin()).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn fixture() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/table3.inst").display().to_string()
}

#[test]
fn solve_writes_outputs_and_verifies_clean() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a");
    let (code, stdout, stderr) = run(&[
        "--mode",
        "solve",
        "--instance",
        &fixture(),
        "--seed",
        "7",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stdout: {stdout} stderr: {stderr}");
    for f in ["plan.txt", "trace.csv", "report.csv"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    // The emitted plan audits clean through the verify mode.
    let (code, stdout, _) = run(&[
        "--mode",
        "verify",
        "--instance",
        &fixture(),
        "--plan",
        out.join("plan.txt").to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("clean audit"));
}

#[test]
fn seeded_runs_are_bit_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let (code, _, stderr) = run(&[
            "--mode",
            "mpas",
            "--instance",
            &fixture(),
            "--seed",
            "42",
            "--out-dir",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{stderr}");
    }
    let plan_a = std::fs::read(a.join("plan.txt")).unwrap();
    let plan_b = std::fs::read(b.join("plan.txt")).unwrap();
    assert_eq!(plan_a, plan_b);
    // Traces match except the wall-clock column.
    let strip = |p: &Path| -> Vec<String> {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .map(|l| l.rsplit_once(',').map(|(head, _)| head.to_string()).unwrap_or_default())
            .collect()
    };
    assert_eq!(strip(&a.join("trace.csv")), strip(&b.join("trace.csv")));
}

#[test]
fn seeded_modes_require_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&[
        "--mode",
        "mpas",
        "--instance",
        &fixture(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
    assert!(stderr.contains("--seed"), "{stderr}");
}

#[test]
fn validation_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.inst");
    std::fs::write(&bad, "version 1\nnot an instance\n").unwrap();
    let (code, _, stderr) = run(&[
        "--mode",
        "ns",
        "--instance",
        bad.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 3, "{stderr}");

    // Oracle refusal on an oversized space is also a validation error.
    let gen_dir = dir.path().join("gen");
    let (code, _, _) = run(&[
        "--mode",
        "gen",
        "--seed",
        "3",
        "--count",
        "1",
        "--ports",
        "9",
        "--ships",
        "2",
        "--out-dir",
        gen_dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let inst = gen_dir.join("inst_3_000.inst");
    let (code, _, stderr) = run(&[
        "--mode",
        "oracle",
        "--instance",
        inst.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
    assert!(stderr.contains("2^16"), "{stderr}");
}

#[test]
fn tampered_plan_fails_verification_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("solve");
    let (code, _, _) = run(&[
        "--mode",
        "solve",
        "--instance",
        &fixture(),
        "--seed",
        "1",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    // Corrupt a bunker amount beyond tank capacity.
    let plan_path = out.join("plan.txt");
    let text = std::fs::read_to_string(&plan_path).unwrap();
    assert!(text.contains("bunker 1"), "fixture solve should bunker somewhere");
    let tampered: Vec<String> = text
        .lines()
        .map(|l| {
            if l.starts_with("visit") && l.contains("bunker 1") {
                // amount token follows "amount"
                let mut toks: Vec<String> = l.split_whitespace().map(|s| s.to_string()).collect();
                let i = toks.iter().position(|t| t == "amount").unwrap();
                toks[i + 1] = "99999".into();
                toks.join(" ")
            } else {
                l.to_string()
            }
        })
        .collect();
    std::fs::write(&plan_path, tampered.join("\n")).unwrap();
    let (code, stdout, _) = run(&[
        "--mode",
        "verify",
        "--instance",
        &fixture(),
        "--plan",
        plan_path.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "{stdout}");
    assert!(stdout.contains("TankCapacity") || stdout.contains("(17)"), "{stdout}");
}

#[test]
fn bench_mode_emits_full_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let (code, _, stderr) = run(&[
        "--mode",
        "bench",
        "--seed",
        "5",
        "--sizes",
        "4x2,5x2",
        "--seeds",
        "2",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");
    let rows = std::fs::read_to_string(out.join("bench.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 4, "rows must equal sizes x seeds, no silent drops");
    let summary = std::fs::read_to_string(out.join("bench_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2);
    // Both sizes fit the default oracle cap, so gap columns are populated.
    for line in rows.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert!(!cols[3].is_empty(), "oracle column missing in {line}");
        assert!(!cols[7].is_empty(), "gap column missing in {line}");
    }
}

#[test]
fn gen_is_reproducible_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let (code, _, _) = run(&[
            "--mode",
            "gen",
            "--seed",
            "11",
            "--count",
            "3",
            "--ports",
            "6",
            "--ships",
            "2",
            "--out-dir",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    for i in 0..3 {
        let name = format!("inst_11_{i:03}.inst");
        let fa = std::fs::read(a.join(&name)).unwrap();
        let fb = std::fs::read(b.join(&name)).unwrap();
        assert_eq!(fa, fb, "{name}");
        bunkerfleet_harness::format::load_instance(&a.join(&name)).unwrap();
    }
}

#[test]
fn profit_tamper_is_reported_with_both_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    run(&["--mode", "solve", "--instance", &fixture(), "--seed", "2", "--out-dir", out.to_str().unwrap()]);
    let plan_path = out.join("plan.txt");
    let text = std::fs::read_to_string(&plan_path).unwrap();
    let tampered = text.replace("fleet_profit", "fleet_profit_was").replace(
        "fleet_profit_was",
        "fleet_profit 123456\n# was",
    );
    std::fs::write(&plan_path, tampered).unwrap();
    let (code, stdout, _) = run(&[
        "--mode",
        "verify",
        "--instance",
        &fixture(),
        "--plan",
        plan_path.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(stdout.contains("ProfitMismatch"), "{stdout}");
    assert!(stdout.contains("123456"), "{stdout}");
}

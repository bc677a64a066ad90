//! Mode dispatch for the CLI: loads inputs, runs the requested experiment and
//! writes `plan.txt` / `trace.csv` / `report.csv` atomically into the output
//! directory. Exit codes: 0 success, 2 infeasible or failed audit, 3 schema
//! or validation error.

use anyhow::{anyhow, Context, Result};
use bunkerfleet_core::model::{Assignment, Instance};
use bunkerfleet_core::oracle::{oracle_solve, OracleConfig};
use bunkerfleet_core::search::{
    mpas_search, neighborhood_search, MpasParams, NsParams, SearchRun, SearchState, TraceRecord,
};
use bunkerfleet_core::singleship::SolverConfig;
use bunkerfleet_core::verify::evaluate_fleet_plan;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::ablation::{self, AblationReport};
use crate::benchrun::{self, BenchParams};
use crate::format;
use crate::generator;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Solve,
    Oracle,
    Ns,
    Mpas,
    AblateWeight,
    AblatePrice,
    Bench,
    Gen,
    Verify,
}

impl Mode {
    pub fn needs_seed(self) -> bool {
        matches!(
            self,
            Mode::Solve | Mode::Mpas | Mode::AblateWeight | Mode::AblatePrice | Mode::Bench | Mode::Gen
        )
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub instance: Option<PathBuf>,
    pub plan: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Samples per MPAS iteration (`m`).
    pub samples: usize,
    pub stagnation: usize,
    pub budget_evals: Option<u64>,
    pub budget_secs: Option<f64>,
    pub out_dir: PathBuf,
    pub oracle_speed_step: Option<f64>,
    pub oracle_qty_step: Option<f64>,
    pub oracle_max_bits: Option<u32>,
    /// Instance count for `gen` and generated ablation batches.
    pub count: usize,
    /// Total ports (depot included) for generated instances.
    pub ports: usize,
    pub ships: usize,
    pub sizes: Vec<(usize, usize)>,
    pub bench_seeds: usize,
}

fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, content).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn trace_csv(trace: &[TraceRecord]) -> String {
    let mut out = String::from("iteration,assignment,h,refined,wall_secs\n");
    for r in trace {
        let _ = writeln!(out, "{},{},{},{},{}", r.iteration, r.bits, r.h, r.refined as u8, r.wall_secs);
    }
    out
}

fn run_report_csv(mode: &str, instance: &str, seed: Option<u64>, run: &SearchRun, wall: f64) -> String {
    let mut out = String::from(
        "mode,instance,seed,profit,iterations,evaluations,degraded_sampler_events,wall_secs\n",
    );
    let _ = writeln!(
        out,
        "{mode},{instance},{},{},{},{},{},{wall}",
        seed.map(|s| s.to_string()).unwrap_or_default(),
        run.best_h,
        run.iterations,
        run.evaluations,
        run.degraded_sampler_events,
    );
    out
}

fn ablation_csv(report: &AblationReport) -> String {
    let mut out = String::from("seed,full_profit,ablated_profit,rel_loss,repaired,excluded\n");
    for e in &report.entries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            e.seed, e.full_profit, e.ablated_profit, e.rel_loss, e.repaired as u8, e.excluded as u8
        );
    }
    out
}

fn load_required_instance(spec: &ExperimentSpec) -> Result<Instance> {
    let path = spec
        .instance
        .as_ref()
        .ok_or_else(|| anyhow!("mode requires --instance <file>"))?;
    format::load_instance(path)
}

fn oracle_config(spec: &ExperimentSpec) -> OracleConfig {
    let mut cfg = OracleConfig::default();
    if let Some(s) = spec.oracle_speed_step {
        cfg.speed_step = s;
    }
    cfg.qty_step = spec.oracle_qty_step;
    if let Some(b) = spec.oracle_max_bits {
        cfg.max_assignment_bits = b;
    }
    cfg
}

/// Execute the experiment; returns the process exit code.
pub fn run(spec: &ExperimentSpec) -> Result<i32> {
    if spec.mode.needs_seed() && spec.seed.is_none() {
        eprintln!("error: this mode is seeded; pass --seed <u64>");
        return Ok(EXIT_VALIDATION);
    }
    std::fs::create_dir_all(&spec.out_dir)
        .with_context(|| format!("creating {}", spec.out_dir.display()))?;
    match spec.mode {
        Mode::Solve | Mode::Mpas => run_mpas(spec),
        Mode::Ns => run_ns(spec),
        Mode::Oracle => run_oracle(spec),
        Mode::AblateWeight => run_ablation(spec, true),
        Mode::AblatePrice => run_ablation(spec, false),
        Mode::Bench => run_bench(spec),
        Mode::Gen => run_gen(spec),
        Mode::Verify => run_verify(spec),
    }
}

fn instance_label(spec: &ExperimentSpec) -> String {
    spec.instance
        .as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| "generated".into())
}

fn run_mpas(spec: &ExperimentSpec) -> Result<i32> {
    let inst = match load_required_instance(spec) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(EXIT_VALIDATION);
        }
    };
    let t = Instant::now();
    let y0 = Assignment::zeros(inst.num_ships(), inst.num_customers());
    let params = MpasParams {
        samples_per_iter: spec.samples,
        stagnation: spec.stagnation,
        seed: spec.seed.unwrap(),
        max_evaluations: spec.budget_evals,
        max_wall_secs: spec.budget_secs,
    };
    let mut state = SearchState::new();
    let run = mpas_search(&inst, &y0, &SolverConfig::default(), &params, &mut state)
        .map_err(|e| anyhow!("{e}"))?;
    finish_search(spec, &inst, "mpas", run, t.elapsed().as_secs_f64())
}

fn run_ns(spec: &ExperimentSpec) -> Result<i32> {
    let inst = match load_required_instance(spec) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(EXIT_VALIDATION);
        }
    };
    let t = Instant::now();
    let y0 = Assignment::zeros(inst.num_ships(), inst.num_customers());
    let params = NsParams { max_evaluations: spec.budget_evals, max_wall_secs: spec.budget_secs };
    let mut state = SearchState::new();
    let run = neighborhood_search(&inst, &y0, &SolverConfig::default(), &params, &mut state)
        .map_err(|e| anyhow!("{e}"))?;
    finish_search(spec, &inst, "ns", run, t.elapsed().as_secs_f64())
}

fn finish_search(
    spec: &ExperimentSpec,
    inst: &Instance,
    mode: &str,
    run: SearchRun,
    wall: f64,
) -> Result<i32> {
    let audit = evaluate_fleet_plan(inst, &run.best_plan).map_err(|e| anyhow!("{e}"))?;
    if !audit.is_clean() {
        eprintln!("internal error: best plan failed its audit: {:?}", audit.violations);
        return Ok(1);
    }
    write_atomic(&spec.out_dir.join("plan.txt"), &format::emit_plan(&run.best_plan))?;
    write_atomic(&spec.out_dir.join("trace.csv"), &trace_csv(&run.trace))?;
    write_atomic(
        &spec.out_dir.join("report.csv"),
        &run_report_csv(mode, &instance_label(spec), spec.seed, &run, wall),
    )?;
    println!(
        "{mode}: profit {} after {} evaluations ({} iterations, {:.2}s)",
        run.best_h, run.evaluations, run.iterations, wall
    );
    Ok(EXIT_OK)
}

fn run_oracle(spec: &ExperimentSpec) -> Result<i32> {
    let inst = match load_required_instance(spec) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(EXIT_VALIDATION);
        }
    };
    let t = Instant::now();
    match oracle_solve(&inst, &oracle_config(spec)) {
        Ok(res) => {
            let wall = t.elapsed().as_secs_f64();
            write_atomic(&spec.out_dir.join("plan.txt"), &format::emit_plan(&res.plan))?;
            let mut report =
                String::from("mode,instance,seed,profit,assignments_evaluated,wall_secs\n");
            let _ = writeln!(
                report,
                "oracle,{},,{},{},{wall}",
                instance_label(spec),
                res.profit,
                res.assignments_evaluated
            );
            write_atomic(&spec.out_dir.join("report.csv"), &report)?;
            println!(
                "oracle: profit {} over {} assignments ({:.2}s)",
                res.profit, res.assignments_evaluated, wall
            );
            Ok(EXIT_OK)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(EXIT_VALIDATION)
        }
    }
}

fn run_ablation(spec: &ExperimentSpec, weight: bool) -> Result<i32> {
    let seed = spec.seed.unwrap();
    let instances: Vec<Instance> = match &spec.instance {
        Some(path) => match format::load_instance(path) {
            Ok(i) => vec![i],
            Err(e) => {
                eprintln!("error: {e:#}");
                return Ok(EXIT_VALIDATION);
            }
        },
        None => generator::generate_batch(seed, spec.count, spec.ports, spec.ships),
    };
    let report = if weight {
        ablation::run_batch(&instances, seed, ablation::ablate_weight)?
    } else {
        ablation::run_batch(&instances, seed, ablation::ablate_price)?
    };
    write_atomic(&spec.out_dir.join("report.csv"), &ablation_csv(&report))?;
    let label = if weight { "weight" } else { "price" };
    let mut summary = String::from("ablation,instances,excluded,mean_rel_loss,max_rel_loss\n");
    let _ = writeln!(
        summary,
        "{label},{},{},{},{}",
        report.entries.len(),
        report.excluded,
        report.mean_loss,
        report.max_loss
    );
    write_atomic(&spec.out_dir.join("summary.csv"), &summary)?;
    println!(
        "ablate-{label}: mean loss {:.4}% (max {:.4}%) over {} instances, {} excluded",
        100.0 * report.mean_loss,
        100.0 * report.max_loss,
        report.entries.len(),
        report.excluded
    );
    Ok(EXIT_OK)
}

fn run_bench(spec: &ExperimentSpec) -> Result<i32> {
    let params = BenchParams {
        sizes: spec.sizes.clone(),
        seeds: spec.bench_seeds,
        base_seed: spec.seed.unwrap(),
        oracle: oracle_config(spec),
        mpas_samples: spec.samples,
        mpas_stagnation: spec.stagnation,
    };
    let (rows, summaries) = benchrun::run_bench(&params)?;
    write_atomic(&spec.out_dir.join("bench.csv"), &benchrun::rows_csv(&rows))?;
    write_atomic(&spec.out_dir.join("bench_summary.csv"), &benchrun::summary_csv(&summaries))?;
    for s in &summaries {
        println!(
            "N={} K={}: oracle {} s, mpas {:.2} s, ns {:.2} s",
            s.ports,
            s.ships,
            s.oracle_mean_secs.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into()),
            s.mpas_mean_secs,
            s.ns_mean_secs
        );
    }
    Ok(EXIT_OK)
}

fn run_gen(spec: &ExperimentSpec) -> Result<i32> {
    let seed = spec.seed.unwrap();
    for i in 0..spec.count {
        let inst = generator::generate(seed + i as u64, spec.ports, spec.ships);
        let name = format!("inst_{seed}_{i:03}.inst");
        write_atomic(&spec.out_dir.join(name), &format::emit_instance(&inst))?;
    }
    println!(
        "gen: wrote {} instance(s) with {} ports / {} ships under {}",
        spec.count,
        spec.ports,
        spec.ships,
        spec.out_dir.display()
    );
    Ok(EXIT_OK)
}

fn run_verify(spec: &ExperimentSpec) -> Result<i32> {
    let inst = match load_required_instance(spec) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(EXIT_VALIDATION);
        }
    };
    let plan_path = match &spec.plan {
        Some(p) => p.clone(),
        None => {
            eprintln!("error: verify requires --plan <file>");
            return Ok(EXIT_VALIDATION);
        }
    };
    let plan = match format::load_plan(&plan_path) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e:#}");
            return Ok(EXIT_VALIDATION);
        }
    };
    match evaluate_fleet_plan(&inst, &plan) {
        Ok(report) => {
            let mut out = String::from("class,constraint,ship,port,detail\n");
            for v in &report.violations {
                let _ = writeln!(
                    out,
                    "{:?},{},{},{},\"{}\"",
                    v.class,
                    v.class.constraint_ref(),
                    v.ship.map(|s| (s + 1).to_string()).unwrap_or_default(),
                    v.port.map(|p| (p + 1).to_string()).unwrap_or_default(),
                    v.detail.replace('"', "'")
                );
            }
            write_atomic(&spec.out_dir.join("report.csv"), &out)?;
            if report.is_clean() {
                println!("verify: clean audit, profit {}", report.total_profit);
                Ok(EXIT_OK)
            } else {
                println!(
                    "verify: {} violation(s); audited profit {}",
                    report.violations.len(),
                    report.total_profit
                );
                for v in &report.violations {
                    println!("  {v}");
                }
                Ok(EXIT_INFEASIBLE)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(EXIT_VALIDATION)
        }
    }
}

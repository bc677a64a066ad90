//! `bunkerfleet` — joint fleet deployment and bunker management from the
//! command line.

use anyhow::{anyhow, Result};
use bunkerfleet_harness::experiment::{run, ExperimentSpec, Mode};
use clap::{Parser, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliMode {
    /// Solve with the most-promising-area search (alias of `mpas`).
    Solve,
    /// Exhaustive discretized baseline for tiny instances.
    Oracle,
    /// First-improvement neighborhood search.
    Ns,
    /// Most-promising-area adaptive random search.
    Mpas,
    /// Re-solve with displacement frozen at departure, audit under the true model.
    AblateWeight,
    /// Re-solve with averaged fuel prices, audit under the true prices.
    AblatePrice,
    /// Timing benchmark across instance sizes.
    Bench,
    /// Generate seeded random instances.
    Gen,
    /// Audit a plan file against an instance.
    Verify,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Mode {
        match m {
            CliMode::Solve => Mode::Solve,
            CliMode::Oracle => Mode::Oracle,
            CliMode::Ns => Mode::Ns,
            CliMode::Mpas => Mode::Mpas,
            CliMode::AblateWeight => Mode::AblateWeight,
            CliMode::AblatePrice => Mode::AblatePrice,
            CliMode::Bench => Mode::Bench,
            CliMode::Gen => Mode::Gen,
            CliMode::Verify => Mode::Verify,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "bunkerfleet",
    about = "Joint fleet deployment and bunker management solver",
    after_help = "Outputs land in --out-dir: plan.txt, trace.csv, report.csv \
                  (bench.csv / summary.csv for the batch modes).\n\
                  Exit codes: 0 ok, 2 infeasible or failed audit, 3 validation error."
)]
struct Cli {
    #[arg(long, value_enum)]
    mode: CliMode,
    /// Instance file; omit in ablation modes to run on a generated batch.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Plan file to audit (verify mode).
    #[arg(long)]
    plan: Option<PathBuf>,
    /// RNG seed; required by the seeded modes (solve, mpas, ablate-*, bench, gen).
    #[arg(long)]
    seed: Option<u64>,
    /// Samples per MPAS iteration.
    #[arg(long, default_value_t = 10)]
    m: usize,
    /// Stop MPAS after this many iterations without improvement.
    #[arg(long, default_value_t = 10)]
    stagnation: usize,
    /// Deterministic evaluation budget for the search modes.
    #[arg(long)]
    budget_evals: Option<u64>,
    /// Wall-clock cap in seconds (emergency stop; breaks bit-reproducibility
    /// only when it fires).
    #[arg(long)]
    budget_secs: Option<f64>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Oracle tour-speed grid step, knots.
    #[arg(long)]
    oracle_speed_step: Option<f64>,
    /// Oracle quantity grid step, TEU (default: a quarter of each demand).
    #[arg(long)]
    oracle_qty_step: Option<f64>,
    /// Oracle cap on assignment-space bits (ships x customer ports).
    #[arg(long)]
    oracle_max_bits: Option<u32>,
    /// Instances to generate (gen mode and generated ablation batches).
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Total ports, depot included, for generated instances.
    #[arg(long, default_value_t = 7)]
    ports: usize,
    /// Ships for generated instances.
    #[arg(long, default_value_t = 2)]
    ships: usize,
    /// Bench sizes as comma-separated NxK pairs.
    #[arg(long, default_value = "5x2,6x2,7x2,8x2,9x2")]
    sizes: String,
    /// Seeds per bench size.
    #[arg(long, default_value_t = 5)]
    seeds: usize,
}

fn parse_sizes(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(|tok| {
            let (n, k) = tok
                .trim()
                .split_once(['x', 'X'])
                .ok_or_else(|| anyhow!("size '{tok}' is not of the form NxK"))?;
            Ok((n.trim().parse()?, k.trim().parse()?))
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let sizes = match parse_sizes(&cli.sizes) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let spec = ExperimentSpec {
        mode: cli.mode.into(),
        instance: cli.instance,
        plan: cli.plan,
        seed: cli.seed,
        samples: cli.m,
        stagnation: cli.stagnation,
        budget_evals: cli.budget_evals,
        budget_secs: cli.budget_secs,
        out_dir: cli.out_dir,
        oracle_speed_step: cli.oracle_speed_step,
        oracle_qty_step: cli.oracle_qty_step,
        oracle_max_bits: cli.oracle_max_bits,
        count: cli.count,
        ports: cli.ports,
        ships: cli.ships,
        sizes,
        bench_seeds: cli.seeds,
    };
    match run(&spec) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

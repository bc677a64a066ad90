//! Timing benchmark across instance sizes: wall time and profit for the
//! exhaustive oracle, the most-promising-area search and neighborhood search,
//! with optimality gaps where the oracle runs. Emits per-run rows plus a
//! per-size scaling summary.

use anyhow::{anyhow, Result};
use bunkerfleet_core::model::{Assignment, Instance};
use bunkerfleet_core::oracle::{gap, oracle_solve, OracleConfig};
use bunkerfleet_core::search::{
    mpas_search, neighborhood_search, MpasParams, NsParams, SearchState,
};
use bunkerfleet_core::singleship::SolverConfig;
use std::fmt::Write as _;
use std::time::Instant;

use crate::generator;

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub ports: usize,
    pub ships: usize,
    pub seed: u64,
    pub oracle_secs: Option<f64>,
    pub oracle_profit: Option<f64>,
    pub mpas_secs: f64,
    pub mpas_profit: f64,
    pub mpas_gap: Option<f64>,
    pub ns_secs: f64,
    pub ns_profit: f64,
    pub ns_gap: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BenchSummary {
    pub ports: usize,
    pub ships: usize,
    pub oracle_mean_secs: Option<f64>,
    pub mpas_mean_secs: f64,
    pub ns_mean_secs: f64,
    pub mpas_mean_gap: Option<f64>,
    pub mpas_max_gap: Option<f64>,
    pub ns_mean_gap: Option<f64>,
    pub ns_max_gap: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BenchParams {
    pub sizes: Vec<(usize, usize)>,
    pub seeds: usize,
    pub base_seed: u64,
    pub oracle: OracleConfig,
    pub mpas_samples: usize,
    pub mpas_stagnation: usize,
}

impl Default for BenchParams {
    fn default() -> Self {
        BenchParams {
            sizes: vec![(5, 2), (6, 2), (7, 2), (8, 2), (9, 2)],
            seeds: 5,
            base_seed: 1,
            oracle: OracleConfig::default(),
            mpas_samples: 10,
            mpas_stagnation: 10,
        }
    }
}

pub fn run_bench(params: &BenchParams) -> Result<(Vec<BenchRow>, Vec<BenchSummary>)> {
    let solver_cfg = SolverConfig::default();
    let mut rows = Vec::new();
    for &(ports, ships) in &params.sizes {
        for s in 0..params.seeds {
            let seed = params.base_seed + s as u64;
            let inst = generator::generate(seed.wrapping_mul(1000) + ports as u64, ports, ships);
            rows.push(bench_one(&inst, ports, ships, seed, params, &solver_cfg)?);
        }
    }
    let summaries = summarize(&rows);
    Ok((rows, summaries))
}

fn bench_one(
    inst: &Instance,
    ports: usize,
    ships: usize,
    seed: u64,
    params: &BenchParams,
    solver_cfg: &SolverConfig,
) -> Result<BenchRow> {
    let y0 = Assignment::zeros(inst.num_ships(), inst.num_customers());

    let t = Instant::now();
    let oracle_out = oracle_solve(inst, &params.oracle).ok();
    let oracle_secs = oracle_out.as_ref().map(|_| t.elapsed().as_secs_f64());
    let oracle_profit = oracle_out.as_ref().map(|o| o.profit);

    let t = Instant::now();
    let mpas = {
        let mut state = SearchState::new();
        let p = MpasParams {
            samples_per_iter: params.mpas_samples,
            stagnation: params.mpas_stagnation,
            seed,
            ..Default::default()
        };
        mpas_search(inst, &y0, solver_cfg, &p, &mut state).map_err(|e| anyhow!("{e}"))?
    };
    let mpas_secs = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let ns = {
        let mut state = SearchState::new();
        neighborhood_search(inst, &y0, solver_cfg, &NsParams::default(), &mut state)
            .map_err(|e| anyhow!("{e}"))?
    };
    let ns_secs = t.elapsed().as_secs_f64();

    let gap_of = |h: f64| -> Option<f64> {
        oracle_profit.and_then(|o| gap(h, o).ok()).map(|g| g.value)
    };
    Ok(BenchRow {
        ports,
        ships,
        seed,
        oracle_secs,
        oracle_profit,
        mpas_secs,
        mpas_profit: mpas.best_h,
        mpas_gap: gap_of(mpas.best_h),
        ns_secs,
        ns_profit: ns.best_h,
        ns_gap: gap_of(ns.best_h),
    })
}

fn summarize(rows: &[BenchRow]) -> Vec<BenchSummary> {
    let mut sizes: Vec<(usize, usize)> = rows.iter().map(|r| (r.ports, r.ships)).collect();
    sizes.dedup();
    sizes
        .into_iter()
        .map(|(ports, ships)| {
            let group: Vec<&BenchRow> =
                rows.iter().filter(|r| r.ports == ports && r.ships == ships).collect();
            let mean = |xs: Vec<f64>| -> Option<f64> {
                if xs.is_empty() {
                    None
                } else {
                    Some(xs.iter().sum::<f64>() / xs.len() as f64)
                }
            };
            let maxi = |xs: Vec<f64>| xs.into_iter().fold(None, |m: Option<f64>, x| Some(m.map_or(x, |v| v.max(x))));
            BenchSummary {
                ports,
                ships,
                oracle_mean_secs: mean(group.iter().filter_map(|r| r.oracle_secs).collect()),
                mpas_mean_secs: mean(group.iter().map(|r| r.mpas_secs).collect()).unwrap_or(0.0),
                ns_mean_secs: mean(group.iter().map(|r| r.ns_secs).collect()).unwrap_or(0.0),
                mpas_mean_gap: mean(group.iter().filter_map(|r| r.mpas_gap).collect()),
                mpas_max_gap: maxi(group.iter().filter_map(|r| r.mpas_gap).collect()),
                ns_mean_gap: mean(group.iter().filter_map(|r| r.ns_gap).collect()),
                ns_max_gap: maxi(group.iter().filter_map(|r| r.ns_gap).collect()),
            }
        })
        .collect()
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn rows_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(
        "ports,ships,seed,oracle_secs,oracle_profit,mpas_secs,mpas_profit,mpas_gap,ns_secs,ns_profit,ns_gap\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.ports,
            r.ships,
            r.seed,
            opt(r.oracle_secs),
            opt(r.oracle_profit),
            r.mpas_secs,
            r.mpas_profit,
            opt(r.mpas_gap),
            r.ns_secs,
            r.ns_profit,
            opt(r.ns_gap),
        );
    }
    out
}

pub fn summary_csv(summaries: &[BenchSummary]) -> String {
    let mut out = String::from(
        "ports,ships,oracle_mean_secs,mpas_mean_secs,ns_mean_secs,mpas_mean_gap,mpas_max_gap,ns_mean_gap,ns_max_gap\n",
    );
    for s in summaries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            s.ports,
            s.ships,
            opt(s.oracle_mean_secs),
            s.mpas_mean_secs,
            s.ns_mean_secs,
            opt(s.mpas_mean_gap),
            opt(s.mpas_max_gap),
            opt(s.ns_mean_gap),
            opt(s.ns_max_gap),
        );
    }
    out
}

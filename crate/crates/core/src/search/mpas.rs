//! Most-promising-area search: adaptive random search whose sampling region is
//! the set of assignments at least as close (Hamming) to the incumbent as to
//! any other visited assignment. The region shrinks as evidence accumulates,
//! and uniform sampling inside it converges with probability 1 to the set of
//! single-flip local optima when left running; in practice the run stops after
//! a fixed number of stagnant iterations.

use super::{commit_pipeline, elapsed_secs, evaluate_pipeline, SearchRun, SearchState, TraceRecord};
use crate::model::{hamming, Assignment, Instance, ModelError};
use crate::par;
use crate::singleship::SolverConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct MpasParams {
    /// Samples drawn per iteration (`m`).
    pub samples_per_iter: usize,
    /// Stop after this many iterations without an incumbent change.
    pub stagnation: usize,
    pub seed: u64,
    /// Cap on fresh assignment evaluations; `None` leaves only stagnation.
    pub max_evaluations: Option<u64>,
    /// Wall-clock emergency stop, checked between iterations. Runs are only
    /// bit-reproducible when this cap does not fire.
    pub max_wall_secs: Option<f64>,
}

impl Default for MpasParams {
    fn default() -> Self {
        MpasParams {
            samples_per_iter: 10,
            stagnation: 10,
            seed: 0,
            max_evaluations: None,
            max_wall_secs: None,
        }
    }
}

/// Membership test for the most promising area: `y` qualifies iff it is at
/// least as close to the incumbent as to every other visited assignment
/// (ties included). With nothing but the incumbent visited the region is the
/// whole space.
pub fn mpa_contains<'a, I>(y: &Assignment, incumbent: &Assignment, visited: I) -> Result<bool, ModelError>
where
    I: IntoIterator<Item = &'a Assignment>,
{
    let d_inc = hamming(y, incumbent)?;
    for v in visited {
        if v == incumbent {
            continue;
        }
        if hamming(y, v)? < d_inc {
            return Ok(false);
        }
    }
    Ok(true)
}

fn uniform_assignment(ships: usize, customers: usize, rng: &mut ChaCha8Rng) -> Assignment {
    let mut a = Assignment::zeros(ships, customers);
    for bit in 0..a.num_bits() {
        if rng.gen_bool(0.5) {
            a.set_bit(bit, true);
        }
    }
    a
}

/// Draw `m` assignments from the current most promising area.
///
/// Primary method is rejection sampling (uniform over the whole space, keep
/// region members), which is exactly uniform over the region. After
/// `1000 * m` failed attempts the sampler degrades to radius-stratified
/// draws around the incumbent (flip `j` distinct digits, `j` ascending),
/// filtered for membership; that preserves support over the whole region
/// though not exact uniformity. The incumbent itself is always a member, so
/// the sampler cannot come back empty.
pub fn sample_mpa(
    state: &SearchState,
    m: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Assignment>, bool), ModelError> {
    let incumbent = state
        .incumbent()
        .ok_or_else(|| ModelError::Invalid("sampling needs an evaluated starting point".into()))?;
    let inc_bits = incumbent.bits.clone();
    let ships = inc_bits.num_ships();
    let customers = inc_bits.num_customers();
    let visited: Vec<&Assignment> = state.entries().iter().map(|e| &e.bits).collect();

    let mut out = Vec::with_capacity(m);
    if visited.len() <= 1 {
        // Nothing but the incumbent visited: the region is the whole space.
        for _ in 0..m {
            out.push(uniform_assignment(ships, customers, rng));
        }
        return Ok((out, false));
    }

    let mut attempts = 0u64;
    let cap = 1000 * m as u64;
    while out.len() < m && attempts < cap {
        attempts += 1;
        let y = uniform_assignment(ships, customers, rng);
        if mpa_contains(&y, &inc_bits, visited.iter().copied())? {
            out.push(y);
        }
    }
    if out.len() == m {
        return Ok((out, false));
    }

    // Degraded mode: stratify by flip radius around the incumbent.
    let bits = inc_bits.num_bits();
    'outer: for _pass in 0..100 {
        for radius in 1..=bits {
            if out.len() == m {
                break 'outer;
            }
            let mut y = inc_bits.clone();
            let mut flipped = Vec::with_capacity(radius);
            while flipped.len() < radius {
                let b = rng.gen_range(0..bits);
                if !flipped.contains(&b) {
                    flipped.push(b);
                    y.flip_bit(b);
                }
            }
            if mpa_contains(&y, &inc_bits, visited.iter().copied())? {
                out.push(y);
            }
        }
    }
    while out.len() < m {
        out.push(inc_bits.clone());
    }
    Ok((out, true))
}

/// Run the most-promising-area search from `y0`. Each iteration samples `m`
/// assignments from the region built on everything visited so far, evaluates
/// the fresh ones (in parallel when enabled; the refinement pass is part of
/// every evaluation), folds them into the visited set and updates the
/// incumbent by value with ties to the earlier evaluation. Deterministic for
/// a fixed `(seed, parameters)` as long as the evaluation budget, not wall
/// time, is the stopping rule.
pub fn mpas_search(
    inst: &Instance,
    y0: &Assignment,
    cfg: &SolverConfig,
    params: &MpasParams,
    state: &mut SearchState,
) -> Result<SearchRun, ModelError> {
    assert!(params.samples_per_iter >= 1);
    assert!(params.stagnation >= 1);
    let start = Instant::now();
    let eval_start = state.raw_evaluations;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut trace = Vec::new();
    let mut degraded = 0u64;
    let mut region_violations = 0u64;

    let push_trace = |state: &SearchState, y: &Assignment, iter: u64, trace: &mut Vec<TraceRecord>| {
        if let Some(i) = state.get_index(y) {
            let e = &state.entries()[i];
            trace.push(TraceRecord {
                iteration: iter,
                bits: e.bits.to_string(),
                h: e.h,
                refined: e.refined_to.is_some(),
                wall_secs: elapsed_secs(start),
            });
        }
    };

    let first = evaluate_pipeline(inst, y0, cfg)?;
    commit_pipeline(state, first);
    push_trace(state, y0, 0, &mut trace);

    let mut incumbent_bits = state.incumbent().unwrap().bits.clone();
    let mut stagnant = 0usize;
    let mut iteration = 0u64;
    loop {
        iteration += 1;
        let (samples, fell_back) = sample_mpa(state, params.samples_per_iter, &mut rng)?;
        if fell_back {
            degraded += 1;
        }
        for y in &samples {
            let inc = state.incumbent().unwrap().bits.clone();
            let visited: Vec<&Assignment> = state.entries().iter().map(|e| &e.bits).collect();
            if !mpa_contains(y, &inc, visited)? {
                region_violations += 1;
            }
        }

        // Evaluate fresh samples in parallel, then fold in sample order.
        let mut fresh: Vec<Assignment> = Vec::new();
        for y in &samples {
            if state.get_index(y).is_none() && !fresh.contains(y) {
                fresh.push(y.clone());
            }
        }
        let results = par::map_vec(fresh, |y| evaluate_pipeline(inst, &y, cfg));
        for r in results {
            commit_pipeline(state, r?);
        }
        for y in &samples {
            push_trace(state, y, iteration, &mut trace);
        }

        let now_bits = state.incumbent().unwrap().bits.clone();
        if now_bits == incumbent_bits {
            stagnant += 1;
        } else {
            incumbent_bits = now_bits;
            stagnant = 0;
        }
        if stagnant >= params.stagnation {
            break;
        }
        if let Some(cap) = params.max_evaluations {
            if state.raw_evaluations - eval_start >= cap {
                break;
            }
        }
        if let Some(cap) = params.max_wall_secs {
            if elapsed_secs(start) >= cap {
                break;
            }
        }
    }

    let best = state.incumbent().unwrap();
    Ok(SearchRun {
        best_bits: best.bits.clone(),
        best_h: best.h,
        best_plan: best.plan.clone(),
        iterations: iteration,
        evaluations: state.raw_evaluations - eval_start,
        trace,
        degraded_sampler_events: degraded,
        region_violations,
    })
}

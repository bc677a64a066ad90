//! First-improvement neighborhood search over single-digit flips.

use super::{elapsed_secs, evaluate_cached, SearchRun, SearchState, TraceRecord};
use crate::model::{Assignment, Instance, ModelError};
use crate::singleship::SolverConfig;
use std::time::Instant;

#[derive(Debug, Clone, Default)]
pub struct NsParams {
    /// Cap on fresh assignment evaluations; `None` runs to the local optimum.
    pub max_evaluations: Option<u64>,
    /// Wall-clock emergency stop, checked between evaluations.
    pub max_wall_secs: Option<f64>,
}

/// Repeatedly scan the single-flip neighborhood of the current point in fixed
/// digit order (ship-major, port-minor) and move to the first strictly
/// improving neighbor; stops at a local optimum or when the budget runs out.
/// Every evaluation goes through the refinement pass, and a move lands on the
/// refined assignment.
pub fn neighborhood_search(
    inst: &Instance,
    y0: &Assignment,
    cfg: &SolverConfig,
    params: &NsParams,
    state: &mut SearchState,
) -> Result<SearchRun, ModelError> {
    let start = Instant::now();
    let eval_start = state.raw_evaluations;
    let mut trace = Vec::new();

    let push_trace = |state: &SearchState, idx: usize, moves: u64, trace: &mut Vec<TraceRecord>| {
        let e = &state.entries()[idx];
        trace.push(TraceRecord {
            iteration: moves,
            bits: e.bits.to_string(),
            h: e.h,
            refined: e.refined_to.is_some(),
            wall_secs: elapsed_secs(start),
        });
    };

    let first = evaluate_cached(inst, y0, cfg, state)?;
    push_trace(state, first, 0, &mut trace);
    let mut cur = state.entries()[first].bits.clone();
    let mut cur_h = state.entries()[first].h;
    let mut moves = 0u64;

    let budget_left = |state: &SearchState| {
        params.max_evaluations.map_or(true, |cap| state.raw_evaluations - eval_start < cap)
            && params.max_wall_secs.map_or(true, |cap| elapsed_secs(start) < cap)
    };

    'scan: loop {
        for bit in 0..cur.num_bits() {
            if !budget_left(state) {
                break 'scan;
            }
            let neighbor = cur.with_flipped(bit);
            let idx = evaluate_cached(inst, &neighbor, cfg, state)?;
            // The trace reports the evaluated neighbor, not its refined twin.
            let raw_idx = state.get_index(&neighbor).unwrap_or(idx);
            push_trace(state, raw_idx, moves, &mut trace);
            let h = state.entries()[idx].h;
            if h > cur_h {
                cur = state.entries()[idx].bits.clone();
                cur_h = h;
                moves += 1;
                continue 'scan;
            }
        }
        break; // full scan without improvement: local optimum
    }

    let best_idx = state.get_index(&cur).expect("current point is always cached");
    let best = &state.entries()[best_idx];
    Ok(SearchRun {
        best_bits: best.bits.clone(),
        best_h: cur_h,
        best_plan: best.plan.clone(),
        iterations: moves,
        evaluations: state.raw_evaluations - eval_start,
        trace,
        degraded_sampler_events: 0,
        region_violations: 0,
    })
}

/// Exhaustively check that no single-digit flip strictly improves on `y`
/// under the evaluate-and-refine pipeline; the termination certificate of
/// [`neighborhood_search`].
pub fn is_local_optimum(
    inst: &Instance,
    y: &Assignment,
    cfg: &SolverConfig,
    state: &mut SearchState,
) -> Result<bool, ModelError> {
    let base = evaluate_cached(inst, y, cfg, state)?;
    let base_h = state.entries()[base].h;
    for bit in 0..y.num_bits() {
        let idx = evaluate_cached(inst, &y.with_flipped(bit), cfg, state)?;
        if state.entries()[idx].h > base_h {
            return Ok(false);
        }
    }
    Ok(true)
}

//! Exact cruise-speed optimization along a fixed visit sequence.
//!
//! With the sequence and per-leg displacements fixed, fuel spend is
//! `sum_l coeff_l / tau_l^2` where `tau_l` is the sailing time of leg `l`
//! (`coeff_l` folds the consumption constant, displacement, fuel value and the
//! cube of the leg distance). The cost is convex and separable in `tau`, leg
//! times are boxed by the speed range, and time windows bound the cumulative
//! sailing time after each leg, so the minimizer is found exactly by
//! water-filling on the dual variable plus recursive anchoring of the most
//! violated window — the classic exact scheme for speed optimization over a
//! path with no waiting allowed.

/// One leg of the sequence, in time coordinates.
#[derive(Debug, Clone, Copy)]
pub struct SpeedLeg {
    /// Fastest allowed sailing time (distance / max speed).
    pub time_min: f64,
    /// Slowest allowed sailing time (distance / min speed).
    pub time_max: f64,
    /// Multiplier of the `1 / tau^2` cost term; non-negative.
    pub cost_coeff: f64,
}

/// Bounds on cumulative sailing time measured after a leg.
#[derive(Debug, Clone, Copy)]
pub struct TimeBounds {
    pub lower: f64,
    pub upper: f64,
}

const TOL: f64 = 1e-9;

/// Water-filling: minimize `sum coeff_l / tau_l^2` subject to
/// `sum tau_l = budget` and the per-leg boxes. Assumes the budget lies within
/// `[sum time_min, sum time_max]`.
fn waterfill(legs: &[SpeedLeg], budget: f64, out: &mut [f64]) {
    debug_assert_eq!(legs.len(), out.len());
    let lo_sum: f64 = legs.iter().map(|l| l.time_min).sum();
    let hi_sum: f64 = legs.iter().map(|l| l.time_max).sum();
    if budget >= hi_sum - TOL {
        for (o, l) in out.iter_mut().zip(legs) {
            *o = l.time_max;
        }
        return;
    }
    if budget <= lo_sum + TOL {
        for (o, l) in out.iter_mut().zip(legs) {
            *o = l.time_min;
        }
        return;
    }
    let total = |lambda: f64| -> f64 {
        legs.iter()
            .map(|l| {
                let t = (2.0 * l.cost_coeff.max(1e-30) / lambda).cbrt();
                t.clamp(l.time_min, l.time_max)
            })
            .sum()
    };
    // Bracket the dual multiplier: total(lambda) decreases from hi_sum to lo_sum.
    let mut lo = 1.0;
    let mut hi = 1.0;
    while total(lo) < budget {
        lo /= 16.0;
        if lo < 1e-300 {
            break;
        }
    }
    while total(hi) > budget {
        hi *= 16.0;
        if hi > 1e300 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) > budget {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-15 * hi {
            break;
        }
    }
    let lambda = 0.5 * (lo + hi);
    for (o, l) in out.iter_mut().zip(legs) {
        *o = (2.0 * l.cost_coeff.max(1e-30) / lambda).cbrt().clamp(l.time_min, l.time_max);
    }
    // Distribute the residual from dual rounding onto unclamped legs.
    let err = budget - out.iter().sum::<f64>();
    if err.abs() > TOL {
        let slack: f64 = out
            .iter()
            .zip(legs)
            .map(|(&t, l)| if err > 0.0 { l.time_max - t } else { t - l.time_min })
            .sum();
        if slack > 0.0 {
            for (o, l) in out.iter_mut().zip(legs) {
                let room = if err > 0.0 { l.time_max - *o } else { *o - l.time_min };
                *o += err * room / slack;
            }
        }
    }
}

/// Forward-reachable interval of cumulative sailing time after each leg,
/// starting from `start`. Returns `None` when the windows are unreachable.
fn reach_intervals(
    legs: &[SpeedLeg],
    checkpoints: &[TimeBounds],
    start: f64,
) -> Option<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(legs.len());
    let (mut lo, mut hi) = (start, start);
    for (l, c) in legs.iter().zip(checkpoints) {
        lo = (lo + l.time_min).max(c.lower);
        hi = (hi + l.time_max).min(c.upper);
        if lo > hi + TOL {
            return None;
        }
        // Collapse numeric noise so anchors stay inside the interval.
        if lo > hi {
            lo = hi;
        }
        out.push((lo, hi));
    }
    Some(out)
}

/// Backward-reachable interval before each leg given a fixed end time.
fn reach_intervals_back(
    legs: &[SpeedLeg],
    checkpoints: &[TimeBounds],
    end: f64,
) -> Option<Vec<(f64, f64)>> {
    let n = legs.len();
    let mut out = vec![(0.0, 0.0); n];
    let (mut lo, mut hi) = (end, end);
    for i in (0..n).rev() {
        lo -= legs[i].time_max;
        hi -= legs[i].time_min;
        if i > 0 {
            lo = lo.max(checkpoints[i - 1].lower);
            hi = hi.min(checkpoints[i - 1].upper);
        }
        if lo > hi + TOL {
            return None;
        }
        if lo > hi {
            lo = hi;
        }
        out[i] = (lo, hi);
    }
    Some(out)
}

fn solve_range(
    legs: &[SpeedLeg],
    checkpoints: &[TimeBounds],
    start: f64,
    end: f64,
    out: &mut [f64],
) -> bool {
    if legs.is_empty() {
        return true;
    }
    waterfill(legs, end - start, out);
    // Most violated interior checkpoint, if any.
    let mut worst: Option<(usize, f64, f64)> = None; // (leg index, anchor value, violation)
    let mut cum = start;
    for i in 0..legs.len() - 1 {
        cum += out[i];
        let c = &checkpoints[i];
        let viol_hi = cum - c.upper;
        let viol_lo = c.lower - cum;
        let (viol, bound) = if viol_hi >= viol_lo { (viol_hi, c.upper) } else { (viol_lo, c.lower) };
        if viol > TOL && worst.map_or(true, |(_, _, w)| viol > w) {
            worst = Some((i, bound, viol));
        }
    }
    let Some((split, anchor, _)) = worst else {
        return true;
    };
    // Clamp the anchor into what is reachable from both ends, then recurse.
    let Some(fwd) = reach_intervals(legs, checkpoints, start) else {
        return false;
    };
    let Some(bwd) = reach_intervals_back(legs, checkpoints, end) else {
        return false;
    };
    let lo = fwd[split].0.max(bwd[split + 1].0);
    let hi = fwd[split].1.min(bwd[split + 1].1);
    if lo > hi + TOL {
        return false;
    }
    let t = anchor.clamp(lo.min(hi), hi);
    let (left_legs, right_legs) = legs.split_at(split + 1);
    let (left_cp, right_cp) = checkpoints.split_at(split + 1);
    let (left_out, right_out) = out.split_at_mut(split + 1);
    solve_range(left_legs, left_cp, start, t, left_out)
        && solve_range(right_legs, right_cp, t, end, right_out)
}

/// Minimize total fuel spend over the leg times. `checkpoints[i]` bounds the
/// cumulative sailing time after leg `i`; the last checkpoint carries the
/// cycle deadline. Returns `None` when no time-feasible allocation exists.
///
/// The returned allocation satisfies every checkpoint to within `1e-9` hours
/// and is optimal to better than `1e-8` relative on the fuel objective.
pub fn optimize_leg_times(legs: &[SpeedLeg], checkpoints: &[TimeBounds]) -> Option<Vec<f64>> {
    assert_eq!(legs.len(), checkpoints.len());
    if legs.is_empty() {
        return Some(Vec::new());
    }
    for l in legs {
        debug_assert!(l.time_min >= 0.0 && l.time_min <= l.time_max + TOL);
    }
    let fwd = reach_intervals(legs, checkpoints, 0.0)?;
    // Slower is always cheaper, so the cycle ends as late as reachability allows.
    let end = fwd.last().unwrap().1;
    let mut out = vec![0.0; legs.len()];
    if solve_range(legs, checkpoints, 0.0, end, &mut out) {
        Some(out)
    } else {
        None
    }
}

/// Fuel objective for a candidate allocation.
pub fn leg_time_cost(legs: &[SpeedLeg], times: &[f64]) -> f64 {
    legs.iter().zip(times).map(|(l, &t)| if t > 0.0 { l.cost_coeff / (t * t) } else { 0.0 }).sum()
}

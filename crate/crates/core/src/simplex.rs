//! Dense bounded-variable simplex for the tiny linear programs of the cargo
//! subproblem (tens of variables, a dozen rows).
//!
//! Solves `maximize c'x  s.t.  A x <= b, 0 <= x <= u` with `b >= 0`, so the
//! all-slack basis with structural variables at their lower bound is feasible
//! and no phase-1 is needed. Pivoting uses Bland's rule throughout, which is
//! slow in theory but cycle-free and deterministic; problem sizes here make
//! the speed difference irrelevant.

/// `maximize c'x  s.t.  rows[i] . x <= rhs[i], 0 <= x <= upper`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    BadShape(String),
    /// Negative right-hand side or invalid bound; the cargo subproblem never produces these.
    BadData(String),
    IterationLimit,
    Unbounded,
}

const EPS: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq)]
enum VarState {
    Basic(usize), // row index it is basic in
    AtLower,
    AtUpper,
}

/// Solve the LP. Variables with `upper <= 0` are fixed at zero.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let n = lp.objective.len();
    let m = lp.rows.len();
    if lp.upper.len() != n {
        return Err(LpError::BadShape("upper bound vector length".into()));
    }
    if lp.rhs.len() != m {
        return Err(LpError::BadShape("rhs length".into()));
    }
    for (i, r) in lp.rows.iter().enumerate() {
        if r.len() != n {
            return Err(LpError::BadShape(format!("row {i} length")));
        }
    }
    for (i, &b) in lp.rhs.iter().enumerate() {
        if b < -EPS {
            return Err(LpError::BadData(format!("rhs[{i}] = {b} < 0")));
        }
    }
    for (j, &u) in lp.upper.iter().enumerate() {
        if u.is_nan() {
            return Err(LpError::BadData(format!("upper[{j}] is NaN")));
        }
    }

    // Tableau over structural + slack variables.
    let total = n + m;
    let mut a = vec![vec![0.0; total]; m];
    let mut b = lp.rhs.clone();
    for i in 0..m {
        a[i][..n].copy_from_slice(&lp.rows[i]);
        a[i][n + i] = 1.0;
    }
    let mut cost = vec![0.0; total];
    cost[..n].copy_from_slice(&lp.objective);
    let mut upper = vec![f64::INFINITY; total];
    for j in 0..n {
        upper[j] = lp.upper[j].max(0.0);
    }

    let mut state = vec![VarState::AtLower; total];
    let mut basis = vec![0usize; m];
    for i in 0..m {
        state[n + i] = VarState::Basic(i);
        basis[i] = n + i;
    }
    // Value of a nonbasic variable given its state.
    let nb_value = |j: usize, state: &[VarState], upper: &[f64]| -> f64 {
        match state[j] {
            VarState::AtUpper => upper[j],
            _ => 0.0,
        }
    };

    let max_iter = 200 * (total + 1);
    for _ in 0..max_iter {
        // Reduced costs via the dual: y = c_B B^{-1}. The tableau is kept in
        // updated (B^{-1} A) form, so reduced costs are direct.
        // With the explicit updated tableau, c_j - z_j = cost[j] - sum_i cost[basis[i]] * a[i][j].
        let mut entering = None;
        for j in 0..total {
            if let VarState::Basic(_) = state[j] {
                continue;
            }
            let mut rc = cost[j];
            for i in 0..m {
                let cb = cost[basis[i]];
                if cb != 0.0 {
                    rc -= cb * a[i][j];
                }
            }
            let improving = match state[j] {
                VarState::AtLower => rc > EPS,
                VarState::AtUpper => rc < -EPS,
                VarState::Basic(_) => false,
            };
            if improving {
                entering = Some((j, rc));
                break; // Bland: first eligible index
            }
        }
        let Some((enter, rc)) = entering else {
            // Optimal: read off the solution.
            let mut x = vec![0.0; total];
            for j in 0..total {
                x[j] = nb_value(j, &state, &upper);
            }
            for i in 0..m {
                let mut v = b[i];
                for j in 0..total {
                    if let VarState::Basic(_) = state[j] {
                        continue;
                    }
                    let xv = nb_value(j, &state, &upper);
                    if xv != 0.0 {
                        v -= a[i][j] * xv;
                    }
                }
                x[basis[i]] = v;
            }
            let xs: Vec<f64> = x[..n].iter().map(|&v| v.max(0.0)).collect();
            let objective = xs.iter().zip(&lp.objective).map(|(x, c)| x * c).sum();
            return Ok(LpSolution { x: xs, objective });
        };

        // Direction: entering variable moves up from lower (dir = +1) or down
        // from upper (dir = -1); basic values change by -dir * column.
        let dir = if rc > 0.0 { 1.0 } else { -1.0 };
        // Current basic values.
        let mut xb = vec![0.0; m];
        for i in 0..m {
            let mut v = b[i];
            for j in 0..total {
                if let VarState::Basic(_) = state[j] {
                    continue;
                }
                let xv = nb_value(j, &state, &upper);
                if xv != 0.0 {
                    v -= a[i][j] * xv;
                }
            }
            xb[i] = v;
        }

        // Ratio test: how far can the entering variable move?
        let own_cap = upper[enter]; // bound-to-bound flip distance
        let mut best_t = own_cap;
        let mut leaving: Option<(usize, bool)> = None; // (row, leaves_at_upper)
        for i in 0..m {
            let coef = dir * a[i][enter];
            if coef > EPS {
                // basic variable decreases toward 0
                let t = xb[i] / coef;
                if t < best_t - EPS {
                    best_t = t.max(0.0);
                    leaving = Some((i, false));
                } else if (t - best_t).abs() <= EPS && leaving.is_some() {
                    // Bland tie-break: keep the lowest basic variable index.
                    let (li, _) = leaving.unwrap();
                    if basis[i] < basis[li] {
                        leaving = Some((i, false));
                    }
                }
            } else if coef < -EPS && upper[basis[i]].is_finite() {
                // basic variable increases toward its upper bound
                let t = (upper[basis[i]] - xb[i]) / -coef;
                if t < best_t - EPS {
                    best_t = t.max(0.0);
                    leaving = Some((i, true));
                } else if (t - best_t).abs() <= EPS && leaving.is_some() {
                    let (li, _) = leaving.unwrap();
                    if basis[i] < basis[li] {
                        leaving = Some((i, true));
                    }
                }
            }
        }
        if best_t.is_infinite() {
            return Err(LpError::Unbounded);
        }

        match leaving {
            None => {
                // Bound flip: entering variable runs to its opposite bound.
                state[enter] = if dir > 0.0 { VarState::AtUpper } else { VarState::AtLower };
            }
            Some((row, leaves_at_upper)) => {
                // Pivot enter into `row`.
                let out = basis[row];
                let piv = a[row][enter];
                debug_assert!(piv.abs() > 1e-12);
                let inv = 1.0 / piv;
                for j in 0..total {
                    a[row][j] *= inv;
                }
                b[row] *= inv;
                for i in 0..m {
                    if i == row {
                        continue;
                    }
                    let f = a[i][enter];
                    if f != 0.0 {
                        for j in 0..total {
                            a[i][j] -= f * a[row][j];
                        }
                        b[i] -= f * b[row];
                    }
                }
                state[out] = if leaves_at_upper { VarState::AtUpper } else { VarState::AtLower };
                state[enter] = VarState::Basic(row);
                basis[row] = enter;
            }
        }
    }
    Err(LpError::IterationLimit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn unconstrained_hits_upper_bounds() {
        let lp = LinearProgram {
            objective: vec![3.0, 1.0],
            rows: vec![],
            rhs: vec![],
            upper: vec![2.0, 5.0],
        };
        let s = solve(&lp).unwrap();
        assert_close(s.objective, 11.0, 1e-9);
    }

    #[test]
    fn negative_value_stays_at_zero() {
        let lp = LinearProgram {
            objective: vec![-1.0, 2.0],
            rows: vec![vec![1.0, 1.0]],
            rhs: vec![10.0],
            upper: vec![5.0, 4.0],
        };
        let s = solve(&lp).unwrap();
        assert_close(s.x[0], 0.0, 1e-9);
        assert_close(s.x[1], 4.0, 1e-9);
    }

    #[test]
    fn knapsack_row_picks_best_density() {
        // max 5a + 4b s.t. a + 2b <= 6, a <= 4, b <= 4
        let lp = LinearProgram {
            objective: vec![5.0, 4.0],
            rows: vec![vec![1.0, 2.0]],
            rhs: vec![6.0],
            upper: vec![4.0, 4.0],
        };
        let s = solve(&lp).unwrap();
        assert_close(s.x[0], 4.0, 1e-9);
        assert_close(s.x[1], 1.0, 1e-9);
        assert_close(s.objective, 24.0, 1e-9);
    }

    #[test]
    fn degenerate_zero_rhs_terminates() {
        let lp = LinearProgram {
            objective: vec![1.0, 1.0],
            rows: vec![vec![1.0, -1.0], vec![1.0, 1.0]],
            rhs: vec![0.0, 2.0],
            upper: vec![10.0, 10.0],
        };
        let s = solve(&lp).unwrap();
        assert_close(s.objective, 2.0, 1e-8);
        assert_close(s.x[0], 1.0, 1e-8);
    }

    /// Brute-force reference: evaluate the LP on a fine grid of the box and
    /// keep the best feasible point. The simplex must match or beat it.
    fn grid_best(lp: &LinearProgram, steps: usize) -> f64 {
        let n = lp.objective.len();
        let mut idx = vec![0usize; n];
        let mut best = f64::NEG_INFINITY;
        loop {
            let x: Vec<f64> =
                (0..n).map(|j| lp.upper[j] * idx[j] as f64 / steps as f64).collect();
            let feasible = lp
                .rows
                .iter()
                .zip(&lp.rhs)
                .all(|(r, &b)| r.iter().zip(&x).map(|(a, v)| a * v).sum::<f64>() <= b + 1e-9);
            if feasible {
                let obj: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                best = best.max(obj);
            }
            let mut k = 0;
            loop {
                if k == n {
                    return best;
                }
                idx[k] += 1;
                if idx[k] <= steps {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn random_lps_match_grid_reference() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for case in 0..40 {
            let n = rng.gen_range(1..=3);
            let m = rng.gen_range(0..=3);
            let lp = LinearProgram {
                objective: (0..n).map(|_| rng.gen_range(-5.0..10.0)).collect(),
                rows: (0..m)
                    .map(|_| (0..n).map(|_| rng.gen_range(0.0..3.0)).collect())
                    .collect(),
                rhs: (0..m).map(|_| rng.gen_range(0.5..8.0)).collect(),
                upper: (0..n).map(|_| rng.gen_range(0.2..4.0)).collect(),
            };
            let s = solve(&lp).unwrap_or_else(|e| panic!("case {case}: {e:?}"));
            // Feasibility of the simplex point.
            for (r, &bb) in lp.rows.iter().zip(&lp.rhs) {
                let lhs: f64 = r.iter().zip(&s.x).map(|(a, v)| a * v).sum();
                assert!(lhs <= bb + 1e-7, "case {case}: row violated by {}", lhs - bb);
            }
            for (j, &v) in s.x.iter().enumerate() {
                assert!(v >= -1e-9 && v <= lp.upper[j] + 1e-7, "case {case}: bound");
            }
            let reference = grid_best(&lp, 60);
            assert!(
                s.objective >= reference - 1e-6 - 0.02 * reference.abs().max(1.0) / 60.0,
                "case {case}: simplex {} below grid {}",
                s.objective,
                reference
            );
        }
    }
}

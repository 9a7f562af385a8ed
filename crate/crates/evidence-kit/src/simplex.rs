//! A small dense-tableau simplex solver.
//!
//! Solves `max c·x` subject to `Ax ≤ b`, `x ≥ 0` with `b ≥ 0`, which makes
//! the slack basis feasible. Problems here are tiny (at most a few hundred
//! rows and `N+2` structural variables), so a dense dictionary with partial
//! pivoting on the ratio test is plenty; Bland's rule kicks in after a
//! degeneracy streak to rule out cycling.

use crate::error::{Error, Result};

/// `max c·x` s.t. `A x ≤ b`, `x ≥ 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    /// Rows `(a, b)` meaning `a · x ≤ b` with `b ≥ 0`.
    pub constraints: Vec<(Vec<f64>, f64)>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

const MAX_PIVOTS: usize = 20_000;
const EPS: f64 = 1e-11;

pub fn maximize(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.objective.len();
    let m = lp.constraints.len();
    for (row, b) in &lp.constraints {
        assert_eq!(row.len(), n, "constraint arity");
        if *b < 0.0 {
            return Err(Error::InvalidParameter(
                "simplex requires nonnegative right-hand sides".into(),
            ));
        }
    }
    // Tableau: m rows × (n structural + m slack + rhs), plus objective row.
    let cols = n + m + 1;
    let mut t = vec![vec![0.0f64; cols]; m + 1];
    for (i, (row, b)) in lp.constraints.iter().enumerate() {
        t[i][..n].copy_from_slice(row);
        t[i][n + i] = 1.0;
        t[i][cols - 1] = *b;
    }
    for (j, c) in lp.objective.iter().enumerate() {
        t[m][j] = -c;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut degenerate_streak = 0usize;

    for _pivot in 0..MAX_PIVOTS {
        let bland = degenerate_streak > 2 * (m + n);
        // Entering column: most negative reduced cost (or Bland: first).
        let mut enter: Option<usize> = None;
        for j in 0..n + m {
            if t[m][j] < -EPS {
                match enter {
                    None => enter = Some(j),
                    Some(best) if !bland && t[m][j] < t[m][best] => enter = Some(j),
                    _ => {}
                }
                if bland {
                    break;
                }
            }
        }
        let Some(enter) = enter else {
            // Optimal.
            let mut x = vec![0.0; n];
            for (i, &bv) in basis.iter().enumerate() {
                if bv < n {
                    x[bv] = t[i][cols - 1];
                }
            }
            return Ok(LpSolution {
                value: t[m][cols - 1],
                x,
            });
        };
        // Leaving row: ratio test, ties broken by the largest pivot element.
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = t[i][enter];
            if a > EPS {
                let ratio = t[i][cols - 1] / a;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - EPS
                            || (ratio < lr + EPS
                                && (bland && basis[i] < basis[li] || !bland && a > t[li][enter]))
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((leave, ratio)) = leave else {
            return Err(Error::UnboundedProgram);
        };
        if ratio < EPS {
            degenerate_streak += 1;
        } else {
            degenerate_streak = 0;
        }
        // Pivot.
        let piv = t[leave][enter];
        for v in t[leave].iter_mut() {
            *v /= piv;
        }
        for i in 0..=m {
            if i != leave {
                let factor = t[i][enter];
                if factor != 0.0 {
                    let (src, dst) = if i < leave {
                        let (a, b) = t.split_at_mut(leave);
                        (&b[0], &mut a[i])
                    } else {
                        let (a, b) = t.split_at_mut(i);
                        (&a[leave], &mut b[0])
                    };
                    for (d, s) in dst.iter_mut().zip(src.iter()) {
                        *d -= factor * s;
                    }
                }
            }
        }
        basis[leave] = enter;
    }
    Err(Error::DidNotConverge(MAX_PIVOTS))
}

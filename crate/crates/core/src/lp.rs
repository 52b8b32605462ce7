//! A small dense two-phase simplex solver for equality-constrained linear
//! programs. Problem sizes here are a handful of rows by a few thousand
//! columns, so a plain tableau with Bland's rule is plenty.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
}

/// Maximize `c · x` subject to `A x = b`, `x ≥ 0`.
///
/// Returns an optimal basic solution. Errors on infeasible or unbounded
/// problems. Redundant equality rows are tolerated.
pub fn solve_max(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::Internal("LP dimensions disagree".into()));
    }

    // Tableau: m rows of [original vars | artificial vars | rhs].
    let cols = n + m;
    let mut t = vec![vec![0.0; cols + 1]; m];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][cols] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: minimize the sum of artificials, written as maximizing the
    // negative sum. With the artificial basis, the reduced cost of an
    // original column j is -Σ_i t[i][j] and the objective value is -Σ_i b_i.
    let mut obj = vec![0.0; cols + 1];
    for j in (0..n).chain(std::iter::once(cols)) {
        let mut s = 0.0;
        for row in t.iter() {
            s += row[j];
        }
        obj[j] = -s;
    }
    simplex_loop(&mut t, &mut obj, &mut basis, Some(n))?;
    if obj[cols].abs() > FEAS_TOL {
        return Err(Error::Numerical(format!(
            "LP infeasible: phase-1 residual {}",
            obj[cols]
        )));
    }

    // Drive remaining artificials out of the basis; drop rows where that is
    // impossible (redundant constraints).
    let mut keep = vec![true; m];
    for i in 0..m {
        if basis[i] >= n {
            let mut pivot_col = None;
            for j in 0..n {
                if t[i][j].abs() > PIVOT_TOL {
                    pivot_col = Some(j);
                    break;
                }
            }
            match pivot_col {
                Some(j) => {
                    pivot_obj(&mut t, &mut obj, i, j);
                    basis[i] = j;
                }
                None => keep[i] = false,
            }
        }
    }
    let mut t: Vec<Vec<f64>> = t
        .into_iter()
        .zip(keep.iter())
        .filter(|(_, k)| **k)
        .map(|(row, _)| row)
        .collect();
    let mut basis: Vec<usize> = basis
        .into_iter()
        .zip(keep.iter())
        .filter(|(_, k)| **k)
        .map(|(v, _)| v)
        .collect();

    // Phase 2: reduced costs of the real objective over the current basis.
    let mut obj = vec![0.0; cols + 1];
    for j in 0..n {
        obj[j] = -c[j];
    }
    for (i, &bv) in basis.iter().enumerate() {
        if obj[bv].abs() > 0.0 {
            let coef = obj[bv];
            for j in 0..=cols {
                obj[j] -= coef * t[i][j];
            }
        }
    }
    simplex_loop(&mut t, &mut obj, &mut basis, Some(n))?;

    let mut x = vec![0.0; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][cols];
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { objective, x })
}

/// Bland's-rule simplex iterations on the tableau. `col_limit` restricts the
/// entering columns to the first `col_limit` (used to keep artificials out).
fn simplex_loop(
    t: &mut [Vec<f64>],
    obj: &mut [f64],
    basis: &mut [usize],
    col_limit: Option<usize>,
) -> Result<()> {
    let m = t.len();
    if m == 0 {
        return Ok(());
    }
    let cols = t[0].len() - 1;
    let limit = col_limit.unwrap_or(cols);
    // Iteration cap guards against tableau corruption from non-finite input.
    let max_iters = 50 * (cols + m) + 1000;
    for _ in 0..max_iters {
        // Entering: smallest index with negative reduced cost.
        let mut enter = None;
        for j in 0..limit {
            if obj[j] < -PIVOT_TOL {
                enter = Some(j);
                break;
            }
        }
        let Some(j) = enter else {
            return Ok(());
        };
        // Leaving: minimum ratio; ties by smallest basis variable (Bland).
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            if t[i][j] > PIVOT_TOL {
                let ratio = t[i][cols] / t[i][j];
                let better = match leave {
                    None => true,
                    Some(cur) => {
                        ratio < best_ratio - 1e-12
                            || (ratio < best_ratio + 1e-12 && basis[i] < basis[cur])
                    }
                };
                if better {
                    leave = Some(i);
                    best_ratio = ratio;
                }
            }
        }
        let Some(i) = leave else {
            return Err(Error::Numerical("LP unbounded".into()));
        };
        pivot_obj(t, obj, i, j);
        basis[i] = j;
    }
    Err(Error::Numerical("simplex failed to terminate".into()))
}

fn pivot_obj(t: &mut [Vec<f64>], obj: &mut [f64], row: usize, col: usize) {
    let cols = t[0].len() - 1;
    let p = t[row][col];
    for j in 0..=cols {
        t[row][j] /= p;
    }
    t[row][col] = 1.0;
    for i in 0..t.len() {
        if i != row && t[i][col].abs() > 0.0 {
            let f = t[i][col];
            for j in 0..=cols {
                t[i][j] -= f * t[row][j];
            }
            t[i][col] = 0.0;
        }
    }
    if obj[col].abs() > 0.0 {
        let f = obj[col];
        for j in 0..=cols {
            obj[j] -= f * t[row][j];
        }
        obj[col] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_equality_lp() {
        // max x0 + 2 x1 s.t. x0 + x1 = 1, x >= 0 -> x1 = 1, objective 2.
        let sol = solve_max(&[1.0, 2.0], &[vec![1.0, 1.0]], &[1.0]).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-9);
        assert!((sol.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn barycentric_weights() {
        // Weights over points {0, 0.5, 1} averaging to 0.3, maximizing
        // 1*w0 + 3*w1 + 0*w2. Best: mix of 0 and 0.5 with w1 = 0.6.
        let c = [1.0, 3.0, 0.0];
        let a = vec![vec![0.0, 0.5, 1.0], vec![1.0, 1.0, 1.0]];
        let b = [0.3, 1.0];
        let sol = solve_max(&c, &a, &b).unwrap();
        assert!((sol.objective - (0.4 + 1.8)).abs() < 1e-9);
        assert!((sol.x[1] - 0.6).abs() < 1e-9);
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        // Same constraint twice.
        let sol = solve_max(
            &[1.0, 0.0],
            &[vec![1.0, 1.0], vec![1.0, 1.0]],
            &[1.0, 1.0],
        )
        .unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        let r = solve_max(&[1.0], &[vec![1.0], vec![1.0]], &[1.0, 2.0]);
        assert!(r.is_err());
    }

    #[test]
    fn negative_rhs_is_flipped() {
        // x0 - x1 = -0.5 with x0 + x1 = 1 -> x0 = 0.25, x1 = 0.75.
        let sol = solve_max(
            &[0.0, 1.0],
            &[vec![1.0, -1.0], vec![1.0, 1.0]],
            &[-0.5, 1.0],
        )
        .unwrap();
        assert!((sol.x[0] - 0.25).abs() < 1e-9);
        assert!((sol.x[1] - 0.75).abs() < 1e-9);
    }

    #[test]
    fn degenerate_vertex() {
        // Prior exactly at a grid point: the single-atom solution is optimal.
        let c = [0.0, 5.0, 0.0];
        let a = vec![vec![0.0, 0.5, 1.0], vec![1.0, 1.0, 1.0]];
        let b = [0.5, 1.0];
        let sol = solve_max(&c, &a, &b).unwrap();
        assert!((sol.objective - 5.0).abs() < 1e-9);
        assert!((sol.x[1] - 1.0).abs() < 1e-9);
    }
}

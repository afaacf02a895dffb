//! Dense two-phase simplex for small standard-form linear programs, and the
//! split-variable basis-pursuit reformulation on top of it.
//!
//! This is the reference route for the splitting solver: independent code
//! path, exact basic solutions, and simplex multipliers that serve directly
//! as the dual certificate. Bland's rule keeps it cycle-free; every
//! iteration refactorizes the (small) basis, trading speed for simplicity
//! and numerical freshness.

use thiserror::Error;

use crate::linalg::{self, LuFactors};
use crate::solver::{SolveOptions, SolverError, SparseSolution};

const REDUCED_COST_TOL: f64 = 1.0e-9;
const PIVOT_TOL: f64 = 1.0e-9;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("linear program is infeasible (phase-1 objective {residual:.3e})")]
    Infeasible { residual: f64 },
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("basis matrix became singular")]
    SingularBasis,
    #[error("simplex iteration limit {0} exceeded")]
    IterationLimit(usize),
}

/// Solution of `min c.x  s.t.  A x = b, x >= 0`.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    /// Simplex multipliers `y` with `A^T y <= c` at optimality.
    pub dual: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// Solves `min c.x  s.t.  A x = b, x >= 0` with a dense two-phase simplex.
/// `a` is row-major `m x n`.
pub fn solve_standard_form(
    a: &[f64],
    m: usize,
    n: usize,
    b: &[f64],
    c: &[f64],
) -> Result<LpSolution, LpError> {
    assert_eq!(a.len(), m * n);
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);

    // Work on a copy with rows flipped so b >= 0, artificial columns
    // appended as an identity.
    let total = n + m;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut flipped = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i] < 0.0;
        let sign = if flip { -1.0 } else { 1.0 };
        let mut row = vec![0.0; total];
        for j in 0..n {
            row[j] = sign * a[i * n + j];
        }
        row[n + i] = 1.0;
        rows.push(row);
        rhs.push(sign * b[i]);
        flipped.push(flip);
    }
    let mut basis: Vec<usize> = (n..total).collect();
    let limit = 200 * (m + n).max(50);
    let mut iterations = 0usize;

    // Phase 1: minimize the sum of artificials.
    let phase1_cost: Vec<f64> = (0..total).map(|j| if j >= n { 1.0 } else { 0.0 }).collect();
    let state = run_simplex(
        &rows,
        &rhs,
        &mut basis,
        &phase1_cost,
        total, // all columns eligible
        &mut iterations,
        limit,
    )?;
    let phase1_obj = state.objective;
    if phase1_obj > 1.0e-8 * linalg::norm2(b).max(1.0) {
        return Err(LpError::Infeasible {
            residual: phase1_obj,
        });
    }

    // Drive artificials out of the basis; drop rows that prove redundant.
    let mut row_idx = 0;
    while row_idx < basis.len() {
        if basis[row_idx] >= n {
            let lu = factor_basis(&rows, &basis).ok_or(LpError::SingularBasis)?;
            let mut replaced = false;
            for j in 0..n {
                if basis.contains(&j) {
                    continue;
                }
                let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
                let w = lu.solve(&col);
                if w[row_idx].abs() > 1.0e-7 {
                    basis[row_idx] = j;
                    replaced = true;
                    break;
                }
            }
            if !replaced {
                // Redundant constraint; remove the row and its artificial.
                rows.remove(row_idx);
                rhs.remove(row_idx);
                flipped.remove(row_idx);
                basis.remove(row_idx);
                continue;
            }
        }
        row_idx += 1;
    }

    // Phase 2: the real objective, artificial columns barred.
    let mut phase2_cost = vec![0.0; total];
    phase2_cost[..n].copy_from_slice(c);
    let state = run_simplex(
        &rows,
        &rhs,
        &mut basis,
        &phase2_cost,
        n, // only original columns may enter
        &mut iterations,
        limit,
    )?;

    let mut x = vec![0.0; n];
    for (i, &col) in basis.iter().enumerate() {
        if col < n {
            x[col] = state.basic_values[i].max(0.0);
        }
    }
    // Un-flip the duals back to the original row orientation.
    let dual: Vec<f64> = state
        .duals
        .iter()
        .zip(&flipped)
        .map(|(&y, &f)| if f { -y } else { y })
        .collect();
    Ok(LpSolution {
        x,
        dual,
        objective: state.objective,
        iterations,
    })
}

struct SimplexState {
    basic_values: Vec<f64>,
    duals: Vec<f64>,
    objective: f64,
}

fn factor_basis(rows: &[Vec<f64>], basis: &[usize]) -> Option<LuFactors> {
    let m = basis.len();
    let mut bmat = vec![0.0; m * m];
    for (i, row) in rows.iter().enumerate() {
        for (k, &col) in basis.iter().enumerate() {
            bmat[i * m + k] = row[col];
        }
    }
    LuFactors::factor(bmat, m).ok()
}

fn run_simplex(
    rows: &[Vec<f64>],
    rhs: &[f64],
    basis: &mut [usize],
    cost: &[f64],
    eligible_cols: usize,
    iterations: &mut usize,
    limit: usize,
) -> Result<SimplexState, LpError> {
    let m = basis.len();
    loop {
        let lu = factor_basis(rows, basis).ok_or(LpError::SingularBasis)?;
        let basic_values = lu.solve(rhs);
        let cost_b: Vec<f64> = basis.iter().map(|&j| cost[j]).collect();
        let duals = lu.solve_transpose(&cost_b);

        // Bland's rule: first eligible column with a negative reduced cost.
        let mut entering = None;
        for j in 0..eligible_cols {
            if basis.contains(&j) {
                continue;
            }
            let col_dot: f64 = rows.iter().enumerate().map(|(i, r)| duals[i] * r[j]).sum();
            if cost[j] - col_dot < -REDUCED_COST_TOL {
                entering = Some(j);
                break;
            }
        }
        let Some(entering) = entering else {
            let objective = linalg::dot(&cost_b, &basic_values);
            return Ok(SimplexState {
                basic_values,
                duals,
                objective,
            });
        };

        let col: Vec<f64> = rows.iter().map(|r| r[entering]).collect();
        let w = lu.solve(&col);
        let mut leaving: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            if w[i] > PIVOT_TOL {
                let ratio = (basic_values[i].max(0.0)) / w[i];
                let better = match leaving {
                    None => true,
                    Some(l) => {
                        ratio < best_ratio - 1.0e-12
                            || ((ratio - best_ratio).abs() <= 1.0e-12 && basis[i] < basis[l])
                    }
                };
                if better {
                    leaving = Some(i);
                    best_ratio = ratio;
                }
            }
        }
        let Some(leaving) = leaving else {
            return Err(LpError::Unbounded);
        };
        basis[leaving] = entering;
        *iterations += 1;
        if *iterations > limit {
            return Err(LpError::IterationLimit(limit));
        }
    }
}

/// Basis pursuit via the split `c = c+ - c-`:
/// `min 1.(c+, c-)  s.t.  [B | -B](c+, c-) = y, c+- >= 0`.
pub(super) fn solve_bp_lp(
    b: &[f64],
    rows: usize,
    cols: usize,
    y: &[f64],
    _options: &SolveOptions,
) -> Result<SparseSolution, SolverError> {
    let split_cols = 2 * cols;
    let mut a = vec![0.0; rows * split_cols];
    for i in 0..rows {
        for j in 0..cols {
            let v = b[i * cols + j];
            a[i * split_cols + j] = v;
            a[i * split_cols + cols + j] = -v;
        }
    }
    let cost = vec![1.0; split_cols];
    let lp = solve_standard_form(&a, rows, split_cols, y, &cost).map_err(|e| match e {
        LpError::Infeasible { residual } => SolverError::Infeasible { residual },
        other => SolverError::Lp(other),
    })?;
    let coefficients: Vec<f64> = (0..cols).map(|j| lp.x[j] - lp.x[cols + j]).collect();
    Ok(SparseSolution {
        objective: linalg::norm1(&coefficients),
        feasibility_residual: 0.0, // recomputed by the caller
        iterations: lp.iterations,
        converged: true,
        dual: lp.dual,
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_textbook_lp() {
        // min -3x1 - 5x2 s.t. x1 + s1 = 4; 2x2 + s2 = 12; 3x1 + 2x2 + s3 = 18.
        // Optimum at x = (2, 6), objective -36.
        let a = vec![
            1.0, 0.0, 1.0, 0.0, 0.0, //
            0.0, 2.0, 0.0, 1.0, 0.0, //
            3.0, 2.0, 0.0, 0.0, 1.0,
        ];
        let b = vec![4.0, 12.0, 18.0];
        let c = vec![-3.0, -5.0, 0.0, 0.0, 0.0];
        let sol = solve_standard_form(&a, 3, 5, &b, &c).unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-9);
        assert!((sol.x[1] - 6.0).abs() < 1e-9);
        assert!((sol.objective + 36.0).abs() < 1e-9);
        // Dual feasibility and strong duality.
        for j in 0..5 {
            let col_dot: f64 = (0..3).map(|i| sol.dual[i] * a[i * 5 + j]).sum();
            assert!(col_dot <= c[j] + 1e-9);
        }
        let dual_obj: f64 = sol.dual.iter().zip(&b).map(|(y, bi)| y * bi).sum();
        assert!((dual_obj - sol.objective).abs() < 1e-9);
    }

    #[test]
    fn handles_negative_rhs() {
        // x1 - x2 = -2, x1 + x2 = 4 -> x = (1, 3); min x1 + x2 = 4.
        let a = vec![1.0, -1.0, 1.0, 1.0];
        let sol = solve_standard_form(&a, 2, 2, &[-2.0, 4.0], &[1.0, 1.0]).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
        assert!((sol.x[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_program() {
        // x1 = 1 and x1 = 2 simultaneously.
        let a = vec![1.0, 1.0];
        let err = solve_standard_form(&a, 2, 1, &[1.0, 2.0], &[1.0]).unwrap_err();
        assert!(matches!(err, LpError::Infeasible { .. }));
    }

    #[test]
    fn detects_unbounded_program() {
        // min -x1 with x1 - x2 = 1, both free to grow.
        let a = vec![1.0, -1.0];
        let err = solve_standard_form(&a, 1, 2, &[1.0], &[-1.0, 0.0]).unwrap_err();
        assert!(matches!(err, LpError::Unbounded));
    }

    #[test]
    fn redundant_rows_are_dropped() {
        // Second row duplicates the first.
        let a = vec![1.0, 1.0, 1.0, 1.0];
        let sol = solve_standard_form(&a, 2, 2, &[2.0, 2.0], &[1.0, 2.0]).unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-9);
        assert!(sol.x[1].abs() < 1e-9);
        assert!((sol.objective - 2.0).abs() < 1e-9);
    }
}

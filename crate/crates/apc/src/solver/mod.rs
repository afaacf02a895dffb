//! Measurement-system assembly and equality-constrained `l1` minimization
//! (basis pursuit).
//!
//! The production solver is an ADMM splitting on the preconditioned system
//! `sqrt(W) A c = sqrt(W) b` with a duality-gap stopping rule, so a
//! converged solution carries its own optimality certificate. A dense
//! two-phase simplex on the split-variable LP reformulation serves as the
//! independent small-instance oracle and as an alternative production path
//! behind `--solver lp`. Row scaling by `sqrt(W)` happens once when the
//! solve starts; the squared weights are never stored.

mod admm;
mod lp;

pub use lp::{solve_standard_form, LpError, LpSolution};

use thiserror::Error;

use crate::basis::TensorBasis;
use crate::linalg;
use crate::par;
use crate::sampling::{SamplerKind, SubsamplePlan};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("plan dimension {plan_dim} does not match basis dimension {basis_dim}")]
    DimensionMismatch { plan_dim: usize, basis_dim: usize },
    #[error("value count {values} does not match plan size {plan}")]
    LengthMismatch { values: usize, plan: usize },
    #[error("non-finite data value at position {index}")]
    NonFiniteValue { index: usize },
    #[error(
        "system is infeasible: no coefficient vector fits the data within tolerance \
         (best residual {residual:.3e})"
    )]
    Infeasible { residual: f64 },
    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
}

/// The (optionally preconditioned) measurement system `A c ~ b`.
#[derive(Debug, Clone)]
pub struct MeasurementSystem {
    a: Vec<f64>, // row-major M x N, entries Phi_j(z_i)
    b: Vec<f64>,
    w: Vec<f64>,
    rows: usize,
    cols: usize,
    preconditioned: bool,
}

impl MeasurementSystem {
    /// Builds a system from raw parts. `W` must be all-positive.
    pub fn new(a: Vec<f64>, rows: usize, cols: usize, b: Vec<f64>, w: Vec<f64>) -> Self {
        assert_eq!(a.len(), rows * cols);
        assert_eq!(b.len(), rows);
        assert_eq!(w.len(), rows);
        assert!(w.iter().all(|&wi| wi > 0.0), "weights must be positive");
        let preconditioned = w.iter().any(|&wi| wi != 1.0);
        Self {
            a,
            b,
            w,
            rows,
            cols,
            preconditioned,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn preconditioned(&self) -> bool {
        self.preconditioned
    }

    /// The scaled pair `(sqrt(W) A, sqrt(W) b)` the solvers operate on.
    fn scaled(&self) -> (Vec<f64>, Vec<f64>) {
        let mut sa = self.a.clone();
        let mut sb = self.b.clone();
        for i in 0..self.rows {
            let s = self.w[i].sqrt();
            if s != 1.0 {
                for v in &mut sa[i * self.cols..(i + 1) * self.cols] {
                    *v *= s;
                }
                sb[i] *= s;
            }
        }
        (sa, sb)
    }

    /// Relative feasibility residual of a candidate solution:
    /// `||sqrt(W)(A c - b)||_2 / max(1, ||sqrt(W) b||_2)`.
    pub fn feasibility_residual(&self, c: &[f64]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.rows {
            let pred = linalg::dot(&self.a[i * self.cols..(i + 1) * self.cols], c);
            let s = self.w[i];
            num += s * (pred - self.b[i]) * (pred - self.b[i]);
            den += s * self.b[i] * self.b[i];
        }
        num.sqrt() / den.sqrt().max(1.0)
    }
}

/// Fills the measurement matrix by basis-evaluation sweeps over the plan
/// points and copies the plan's preconditioning weights.
pub fn assemble(
    basis: &TensorBasis,
    plan: &SubsamplePlan,
    values: &[f64],
) -> Result<MeasurementSystem, SolverError> {
    if plan.dim() != basis.dim() {
        return Err(SolverError::DimensionMismatch {
            plan_dim: plan.dim(),
            basis_dim: basis.dim(),
        });
    }
    if values.len() != plan.len() {
        return Err(SolverError::LengthMismatch {
            values: values.len(),
            plan: plan.len(),
        });
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(SolverError::NonFiniteValue { index });
    }
    let m = plan.len();
    let n = basis.len();
    let rows = par::map_indices(m, |i| basis.evaluate(plan.point(i)));
    let mut a = Vec::with_capacity(m * n);
    for row in rows {
        a.extend_from_slice(&row);
    }
    let mut sys = MeasurementSystem::new(a, m, n, values.to_vec(), plan.precondition_weights().to_vec());
    sys.preconditioned = plan.sampler() != SamplerKind::Mc;
    Ok(sys)
}

/// Which algorithm backs [`solve_bp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// ADMM operator splitting; scales to large `N`.
    Splitting,
    /// Dense two-phase simplex on the split-variable LP; exact on small
    /// instances, used as the oracle.
    Lp,
}

impl std::str::FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "splitting" | "admm" => Ok(SolverKind::Splitting),
            "lp" | "simplex" => Ok(SolverKind::Lp),
            other => Err(format!("unknown solver {other:?} (expected splitting or lp)")),
        }
    }
}

/// Solver tolerances and limits.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SolveOptions {
    /// Relative feasibility tolerance on the equality constraints.
    pub feas_tol: f64,
    /// Relative optimality tolerance on the `l1` objective.
    pub opt_tol: f64,
    /// Iteration cap for the splitting method.
    pub max_iter: usize,
    /// Algorithm selection.
    pub solver: SolverKind,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1.0e-8,
            opt_tol: 1.0e-6,
            max_iter: 50_000,
            solver: SolverKind::Splitting,
        }
    }
}

/// A basis-pursuit solution with its diagnostics.
#[derive(Debug, Clone)]
pub struct SparseSolution {
    /// Coefficients over the ordered index set.
    pub coefficients: Vec<f64>,
    /// `||c||_1`.
    pub objective: f64,
    /// Relative feasibility residual at the returned coefficients.
    pub feasibility_residual: f64,
    /// Iterations spent (1 for the LP path).
    pub iterations: usize,
    /// Whether both tolerance targets were certified.
    pub converged: bool,
    /// Dual vector for the scaled constraints; satisfies
    /// `||(sqrt(W)A)^T nu||_inf <= 1 + opt_tol` and
    /// `nu . sqrt(W) b >= ||c||_1 - opt_tol` on converged solves.
    pub dual: Vec<f64>,
}

/// Minimizes `||c||_1` subject to `sqrt(W) A c = sqrt(W) b` (to tolerance).
pub fn solve_bp(
    system: &MeasurementSystem,
    options: &SolveOptions,
) -> Result<SparseSolution, SolverError> {
    let (sa, sb) = system.scaled();
    let mut solution = match options.solver {
        SolverKind::Splitting => {
            admm::solve(&sa, system.rows, system.cols, &sb, options)?
        }
        SolverKind::Lp => lp::solve_bp_lp(&sa, system.rows, system.cols, &sb, options)?,
    };
    solution.feasibility_residual = system.feasibility_residual(&solution.coefficients);
    solution.objective = linalg::norm1(&solution.coefficients);
    if solution.feasibility_residual > options.feas_tol {
        solution.converged = false;
    }
    Ok(solution)
}

/// Recovery criterion: the computed vector matches the planted one when
/// their max-norm difference is below `1e-3`.
pub fn recover_success(c: &[f64], c_star: &[f64]) -> bool {
    assert_eq!(c.len(), c_star.len(), "coefficient length mismatch");
    c.iter()
        .zip(c_star)
        .all(|(a, b)| (a - b).abs() < 1.0e-3)
}

//! Small dense linear-algebra kernels used across the crate.
//!
//! Everything here operates on flat row-major `&[f64]` buffers. The sizes
//! involved are modest (moment matrices up to ~21x21, Gram matrices of
//! subsample plans up to a few hundred rows), so plain loops are both
//! adequate and easy to audit. The Cholesky routine reports the failing
//! pivot index, which downstream code turns into determinacy diagnostics.

/// Pairwise (cascade) summation. Bounds the rounding error by
/// O(log n) ulps instead of O(n) for a naive left fold.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Dot product with pairwise accumulation.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    pairwise_dot(a, b)
}

fn pairwise_dot(a: &[f64], b: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if a.len() <= BLOCK {
        return a.iter().zip(b).map(|(x, y)| x * y).sum();
    }
    let mid = a.len() / 2;
    pairwise_dot(&a[..mid], &b[..mid]) + pairwise_dot(&a[mid..], &b[mid..])
}

/// `y = A x` for row-major `A` of shape `rows x cols`.
pub fn mat_vec(a: &[f64], rows: usize, cols: usize, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(a.len(), rows * cols);
    debug_assert_eq!(x.len(), cols);
    debug_assert_eq!(y.len(), rows);
    for (i, yi) in y.iter_mut().enumerate() {
        *yi = dot(&a[i * cols..(i + 1) * cols], x);
    }
}

/// `y = A^T x` for row-major `A` of shape `rows x cols`.
pub fn mat_transpose_vec(a: &[f64], rows: usize, cols: usize, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(a.len(), rows * cols);
    debug_assert_eq!(x.len(), rows);
    debug_assert_eq!(y.len(), cols);
    y.fill(0.0);
    for i in 0..rows {
        let xi = x[i];
        if xi == 0.0 {
            continue;
        }
        for (j, yj) in y.iter_mut().enumerate() {
            *yj += xi * a[i * cols + j];
        }
    }
}

/// Euclidean norm.
pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// `l1` norm.
pub fn norm1(x: &[f64]) -> f64 {
    let terms: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    pairwise_sum(&terms)
}

/// Max-norm.
pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Error raised when a symmetric matrix fails its Cholesky factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct NotPositiveDefinite {
    /// Zero-based row at which the pivot became non-positive.
    pub pivot: usize,
}

impl std::fmt::Display for NotPositiveDefinite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "non-positive Cholesky pivot at row {}", self.pivot)
    }
}

impl std::error::Error for NotPositiveDefinite {}

/// Upper-triangular Cholesky factor `R` with `R^T R = A` for a symmetric
/// positive-definite `A` (row-major, `n x n`). The strictly lower triangle
/// of the output is zero. Fails with the offending pivot index when a
/// diagonal entry is non-positive or negligibly small relative to `A`'s
/// corresponding diagonal entry.
pub fn cholesky_upper(a: &[f64], n: usize) -> Result<Vec<f64>, NotPositiveDefinite> {
    debug_assert_eq!(a.len(), n * n);
    let mut r = vec![0.0; n * n];
    for j in 0..n {
        let mut diag = a[j * n + j];
        for i in 0..j {
            diag -= r[i * n + j] * r[i * n + j];
        }
        // Relative floor catches pivots that are zero in exact arithmetic
        // but come out as rounding noise of either sign.
        let floor = 1.0e-13 * a[j * n + j].abs();
        if diag <= floor.max(0.0) || !diag.is_finite() {
            return Err(NotPositiveDefinite { pivot: j });
        }
        let rjj = diag.sqrt();
        r[j * n + j] = rjj;
        for k in (j + 1)..n {
            let mut s = a[j * n + k];
            for i in 0..j {
                s -= r[i * n + j] * r[i * n + k];
            }
            r[j * n + k] = s / rjj;
        }
    }
    Ok(r)
}

/// Solves `R^T R x = b` given the upper-triangular factor from
/// [`cholesky_upper`]. `b` is overwritten with the solution.
pub fn cholesky_solve(r: &[f64], n: usize, b: &mut [f64]) {
    debug_assert_eq!(r.len(), n * n);
    debug_assert_eq!(b.len(), n);
    // Forward substitution with R^T (lower triangular).
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= r[k * n + i] * b[k];
        }
        b[i] = s / r[i * n + i];
    }
    // Back substitution with R.
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= r[i * n + k] * b[k];
        }
        b[i] = s / r[i * n + i];
    }
}

/// Error raised when Gaussian elimination meets a (numerically) singular
/// matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularMatrix;

impl std::fmt::Display for SingularMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "matrix is singular to working precision")
    }
}

impl std::error::Error for SingularMatrix {}

/// Solves the dense square system `A x = b` by Gaussian elimination with
/// partial pivoting. `A` is row-major `n x n` and is consumed as scratch.
pub fn solve_dense(mut a: Vec<f64>, n: usize, mut b: Vec<f64>) -> Result<Vec<f64>, SingularMatrix> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = a[col * n + col].abs();
        for row in (col + 1)..n {
            let v = a[row * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = row;
            }
        }
        if pivot_val < 1.0e-300 || !pivot_val.is_finite() {
            return Err(SingularMatrix);
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        let inv = 1.0 / a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] * inv;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    Ok(b)
}

/// Dense LU factorization with partial pivoting, kept around so several
/// right-hand sides (and transposed systems) can reuse one elimination.
pub struct LuFactors {
    lu: Vec<f64>,
    perm: Vec<usize>,
    n: usize,
}

impl LuFactors {
    /// Factors a row-major `n x n` matrix, consuming it as storage.
    pub fn factor(mut a: Vec<f64>, n: usize) -> Result<Self, SingularMatrix> {
        debug_assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_val = a[col * n + col].abs();
            for row in (col + 1)..n {
                let v = a[row * n + col].abs();
                if v > pivot_val {
                    pivot_val = v;
                    pivot_row = row;
                }
            }
            if pivot_val < 1.0e-300 || !pivot_val.is_finite() {
                return Err(SingularMatrix);
            }
            if pivot_row != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot_row * n + k);
                }
                perm.swap(col, pivot_row);
            }
            let inv = 1.0 / a[col * n + col];
            for row in (col + 1)..n {
                let factor = a[row * n + col] * inv;
                a[row * n + col] = factor; // store L below the diagonal
                for k in (col + 1)..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
            }
        }
        Ok(Self { lu: a, perm, n })
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.lu[i * n + k] * x[k];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= self.lu[i * n + k] * x[k];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// Solves `A^T x = b` (i.e. `U^T L^T P x = b`).
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        // U^T is lower triangular.
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.lu[k * n + i] * y[k];
            }
            y[i] = s / self.lu[i * n + i];
        }
        // L^T is unit upper triangular.
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.lu[k * n + i] * y[k];
            }
            y[i] = s;
        }
        // Undo the row permutation: x[perm[i]] = y[i].
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }
}

//! Univariate orthonormal polynomials from raw moments.
//!
//! The construction runs moments -> Hankel moment matrix -> Cholesky factor
//! -> three-term recurrence coefficients, and evaluation runs the recurrence
//! forward. Failure of the Cholesky factorization is the determinacy
//! diagnostic: a degree-`K` construction needs at least `K + 1` distinct
//! sample values, and the failing pivot index tells the caller the largest
//! degree the data can support.
//!
//! A direct solve of the moment linear system for the monomial coefficients
//! of the top-degree polynomial is kept as a cross-checking diagnostic; the
//! production path is always the Cholesky route.

use thiserror::Error;

use crate::data::{DataError, UnivariateMarginal};
use crate::linalg;

/// Condition-estimate threshold above which construction logs a warning.
const CONDITION_WARN: f64 = 1.0e12;

#[derive(Debug, Error)]
pub enum BasisError {
    #[error(
        "moment matrix not positive definite at pivot {pivot}: reduce K or supply \
         at least K+1 distinct samples (largest supported degree here: {max_degree})"
    )]
    NotPositiveDefinite { pivot: usize, max_degree: usize },
    #[error("determinacy requires at least {needed} distinct samples for degree {degree}, got {distinct}")]
    InsufficientDistinctSamples {
        degree: usize,
        needed: usize,
        distinct: usize,
    },
    #[error("need {needed} moments for degree {degree}, got {got}")]
    NotEnoughMoments {
        degree: usize,
        needed: usize,
        got: usize,
    },
    #[error("zeroth moment must be 1 (probability normalization), got {got}")]
    UnnormalizedMoments { got: f64 },
    #[error("moment linear system is singular; use the Cholesky route instead")]
    SingularMomentSystem,
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Hankel matrix of raw moments together with its upper Cholesky factor.
#[derive(Debug, Clone)]
pub struct HankelMoments {
    h: Vec<f64>, // (K+1)^2 row-major, h[i][j] = nu_{i+j}
    r: Vec<f64>, // upper-triangular factor, R^T R = H
    size: usize, // K + 1
}

impl HankelMoments {
    /// Matrix side length `K + 1`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Degree `K` the factor supports.
    pub fn degree(&self) -> usize {
        self.size - 1
    }

    pub fn hankel(&self) -> &[f64] {
        &self.h
    }

    pub fn cholesky(&self) -> &[f64] {
        &self.r
    }

    /// Ratio of the largest to the smallest diagonal entry of `R`; a cheap
    /// lower bound on the condition number of the factor.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.size;
        let mut lo = f64::INFINITY;
        let mut hi = 0.0_f64;
        for j in 0..n {
            let d = self.r[j * n + j];
            lo = lo.min(d);
            hi = hi.max(d);
        }
        hi / lo
    }
}

/// Builds the `(K+1) x (K+1)` Hankel matrix from `moments[0..=2K]` and
/// factors it. `moments[0]` must be 1.
pub fn build_hankel(moments: &[f64], degree: usize) -> Result<HankelMoments, BasisError> {
    let size = degree + 1;
    let needed = 2 * degree + 1;
    if moments.len() < needed {
        return Err(BasisError::NotEnoughMoments {
            degree,
            needed,
            got: moments.len(),
        });
    }
    if (moments[0] - 1.0).abs() > 1.0e-12 {
        return Err(BasisError::UnnormalizedMoments { got: moments[0] });
    }
    let mut h = vec![0.0; size * size];
    for i in 0..size {
        for j in 0..size {
            h[i * size + j] = moments[i + j];
        }
    }
    let r = linalg::cholesky_upper(&h, size).map_err(|e| BasisError::NotPositiveDefinite {
        pivot: e.pivot,
        max_degree: e.pivot.saturating_sub(1),
    })?;
    let hankel = HankelMoments { h, r, size };
    let cond = hankel.condition_estimate();
    if cond > CONDITION_WARN {
        log::warn!(
            "Hankel Cholesky factor is ill-conditioned (diagonal ratio {cond:.2e}); \
             orthogonality at degree {degree} may be degraded"
        );
    }
    Ok(hankel)
}

/// Three-term recurrence coefficients of an orthonormal polynomial family:
/// `x phi_l = b_{l+1} phi_{l+1} + a_{l+1} phi_l + b_l phi_{l-1}` with
/// `phi_0 = 1/sqrt(b_0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceCoefficients {
    a: Vec<f64>, // a_1..a_K
    b: Vec<f64>, // b_0..b_K, all strictly positive
}

impl RecurrenceCoefficients {
    /// Largest evaluable degree `K`.
    pub fn max_degree(&self) -> usize {
        self.a.len()
    }

    /// `a_j` for `j = 1..=K`.
    pub fn a(&self, j: usize) -> f64 {
        self.a[j - 1]
    }

    /// `b_j` for `j = 0..=K`.
    pub fn b(&self, j: usize) -> f64 {
        self.b[j]
    }

    /// Builds coefficients from explicit arrays; `b` entries must be
    /// strictly positive and `b.len() == a.len() + 1`.
    pub fn from_parts(a: Vec<f64>, b: Vec<f64>) -> Self {
        assert_eq!(b.len(), a.len() + 1, "need b_0..b_K alongside a_1..a_K");
        assert!(b.iter().all(|&v| v > 0.0), "recurrence b_j must be positive");
        Self { a, b }
    }

    /// Full construction from a marginal: distinct-sample determinacy check,
    /// raw moments, Hankel factorization, coefficient extraction.
    pub fn from_marginal(
        marginal: &UnivariateMarginal,
        degree: usize,
    ) -> Result<Self, BasisError> {
        let distinct = marginal.distinct_values();
        if distinct < degree + 1 {
            return Err(BasisError::InsufficientDistinctSamples {
                degree,
                needed: degree + 1,
                distinct,
            });
        }
        let moments = marginal.raw_moments(2 * degree)?;
        let hankel = build_hankel(&moments, degree)?;
        Ok(recurrence_from_cholesky(&hankel))
    }

    /// Evaluates `(phi_0(x), ..., phi_k(x))` by the forward recurrence.
    pub fn evaluate(&self, x: f64, up_to: usize) -> Vec<f64> {
        assert!(
            up_to <= self.max_degree(),
            "degree {up_to} exceeds constructed maximum {}",
            self.max_degree()
        );
        let mut phi = Vec::with_capacity(up_to + 1);
        phi.push(1.0 / self.b[0].sqrt());
        if up_to == 0 {
            return phi;
        }
        let mut prev = 0.0; // phi_{-1}
        let mut curr = phi[0];
        for l in 0..up_to {
            // phi_{l+1} = ((x - a_{l+1}) phi_l - b_l phi_{l-1}) / b_{l+1}
            let next = ((x - self.a[l]) * curr - self.b[l] * prev) / self.b[l + 1];
            phi.push(next);
            prev = curr;
            curr = next;
        }
        phi
    }

    /// CSV table of the coefficients, columns `j,a_j,b_j`. The `a` field of
    /// the `j = 0` row is empty (the recurrence has no `a_0`).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,a_j,b_j\n");
        out.push_str(&format!("0,,{}\n", self.b[0]));
        for j in 1..=self.max_degree() {
            out.push_str(&format!("{},{},{}\n", j, self.a[j - 1], self.b[j]));
        }
        out
    }
}

/// Extracts recurrence coefficients from a factored Hankel matrix:
/// `a_j = r_{j,j+1}/r_{j,j} - r_{j-1,j}/r_{j-1,j-1}` and
/// `b_j = r_{j+1,j+1}/r_{j,j}`, with the conventions `r_{0,0} = 1`,
/// `r_{0,1} = 0` for the fictitious row above the factor, and `b_0` equal
/// to the zeroth moment.
pub fn recurrence_from_cholesky(hankel: &HankelMoments) -> RecurrenceCoefficients {
    let n = hankel.size;
    let r = |i: usize, j: usize| -> f64 {
        // 1-based entries of the factor; (0,0) and (0,1) are conventions.
        if i == 0 {
            if j == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            hankel.r[(i - 1) * n + (j - 1)]
        }
    };
    let degree = hankel.degree();
    let mut a = Vec::with_capacity(degree);
    let mut b = Vec::with_capacity(degree + 1);
    b.push(hankel.h[0]); // b_0 = nu_0
    for j in 1..=degree {
        a.push(r(j, j + 1) / r(j, j) - r(j - 1, j) / r(j - 1, j - 1));
        b.push(r(j + 1, j + 1) / r(j, j));
    }
    RecurrenceCoefficients { a, b }
}

/// Diagnostic route: monomial coefficients `beta_0..beta_K` of the
/// top-degree orthogonal polynomial, from the moment linear system whose
/// first `K` rows impose orthogonality to `1, x, ..., x^{K-1}` and whose
/// last row pins `beta_K = 1`. The result is proportional (not equal) to
/// the orthonormal polynomial from the Cholesky route.
pub fn monomial_coefficients(moments: &[f64], degree: usize) -> Result<Vec<f64>, BasisError> {
    let size = degree + 1;
    let needed = 2 * degree; // rows use nu_0..nu_{2K-1}
    if moments.len() < needed.max(1) {
        return Err(BasisError::NotEnoughMoments {
            degree,
            needed: needed.max(1),
            got: moments.len(),
        });
    }
    let mut a = vec![0.0; size * size];
    let mut rhs = vec![0.0; size];
    for row in 0..degree {
        for col in 0..size {
            a[row * size + col] = moments[row + col];
        }
    }
    a[degree * size + degree] = 1.0;
    rhs[degree] = 1.0;
    linalg::solve_dense(a, size, rhs).map_err(|_| BasisError::SingularMomentSystem)
}

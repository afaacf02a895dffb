//! Tensor-product multivariate basis and the normalized Christoffel
//! function.
//!
//! Each dimension carries its own orthonormal univariate family built from
//! the corresponding marginal with uniform weights; the multivariate basis
//! functions are products across dimensions, indexed by a
//! [`MultiIndexSet`]. The Christoffel function is computed from the same
//! evaluation sweep as the basis itself, so preconditioner values and
//! measurement-matrix entries are exactly consistent.

use thiserror::Error;

use crate::data::EmpiricalSampleSet;
use crate::indexset::{IndexSetError, MultiIndexSet};
use crate::recurrence::{BasisError, RecurrenceCoefficients};

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("dimension {dim}: {source}")]
    Dimension { dim: usize, source: BasisError },
    #[error("index set dimension {index_dim} does not match data dimension {data_dim}")]
    DimensionMismatch { index_dim: usize, data_dim: usize },
    #[error("index set needs degree {needed} in dimension {dim}, but construction degree is {degree}")]
    DegreeTooLow {
        dim: usize,
        needed: u32,
        degree: usize,
    },
    #[error(transparent)]
    IndexSet(#[from] IndexSetError),
}

/// A `d`-variate orthonormal polynomial basis over an ordered index set.
#[derive(Debug, Clone)]
pub struct TensorBasis {
    per_dim: Vec<RecurrenceCoefficients>,
    index_set: MultiIndexSet,
}

impl TensorBasis {
    /// Builds per-dimension recurrences of degree `degree` from the
    /// marginals of `data` (uniform weights) and pairs them with
    /// `index_set`. Every dimension must supply at least `degree + 1`
    /// distinct values; failures carry the offending dimension.
    pub fn build(
        data: &EmpiricalSampleSet,
        degree: usize,
        index_set: MultiIndexSet,
    ) -> Result<Self, TensorError> {
        if index_set.dim() != data.dim() {
            return Err(TensorError::DimensionMismatch {
                index_dim: index_set.dim(),
                data_dim: data.dim(),
            });
        }
        for i in 0..data.dim() {
            let needed = index_set.max_degree_in_dim(i);
            if (needed as usize) > degree {
                return Err(TensorError::DegreeTooLow {
                    dim: i,
                    needed,
                    degree,
                });
            }
        }
        let mut per_dim = Vec::with_capacity(data.dim());
        for i in 0..data.dim() {
            let marginal = data
                .marginalize(i)
                .expect("dimension index validated above");
            let rc = RecurrenceCoefficients::from_marginal(&marginal, degree)
                .map_err(|source| TensorError::Dimension { dim: i, source })?;
            per_dim.push(rc);
        }
        Ok(Self { per_dim, index_set })
    }

    /// Convenience: total-degree set of the data's dimension.
    pub fn total_degree(data: &EmpiricalSampleSet, degree: usize) -> Result<Self, TensorError> {
        let index_set = MultiIndexSet::total_degree(data.dim(), degree)?;
        Self::build(data, degree, index_set)
    }

    /// Number of basis functions `N`.
    pub fn len(&self) -> usize {
        self.index_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_set.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.per_dim.len()
    }

    pub fn index_set(&self) -> &MultiIndexSet {
        &self.index_set
    }

    /// Univariate recurrence for dimension `i`.
    pub fn recurrence(&self, i: usize) -> &RecurrenceCoefficients {
        &self.per_dim[i]
    }

    /// Evaluates all `N` basis functions at `z`: one univariate recurrence
    /// sweep per dimension, then products over the index set.
    pub fn evaluate(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.dim(), "point dimension mismatch");
        let sweeps: Vec<Vec<f64>> = self
            .per_dim
            .iter()
            .enumerate()
            .map(|(i, rc)| rc.evaluate(z[i], self.index_set.max_degree_in_dim(i) as usize))
            .collect();
        self.index_set
            .iter()
            .map(|lambda| {
                lambda
                    .iter()
                    .enumerate()
                    .map(|(i, &deg)| sweeps[i][deg as usize])
                    .product()
            })
            .collect()
    }

    /// Normalized Christoffel function `(1/N) * sum_j Phi_j(z)^2`. Strictly
    /// positive whenever the index set contains the zero index.
    pub fn christoffel(&self, z: &[f64]) -> f64 {
        let phi = self.evaluate(z);
        phi.iter().map(|v| v * v).sum::<f64>() / self.len() as f64
    }

    /// Basis values and the Christoffel value from a single sweep.
    pub fn evaluate_with_christoffel(&self, z: &[f64]) -> (Vec<f64>, f64) {
        let phi = self.evaluate(z);
        let kappa = phi.iter().map(|v| v * v).sum::<f64>() / self.len() as f64;
        (phi, kappa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_2d_pm1() -> EmpiricalSampleSet {
        // Tensorial grid {-1,1} x {-1,1}, uniform weights.
        EmpiricalSampleSet::new(
            vec![-1.0, -1.0, -1.0, 1.0, 1.0, -1.0, 1.0, 1.0],
            2,
            None,
        )
        .unwrap()
    }

    fn three_atom_1d() -> EmpiricalSampleSet {
        EmpiricalSampleSet::new(vec![-1.0, 0.0, 1.0], 1, None).unwrap()
    }

    #[test]
    fn one_dimensional_build_matches_univariate_construction() {
        let s = three_atom_1d();
        let tb = TensorBasis::total_degree(&s, 1).unwrap();
        let rc = RecurrenceCoefficients::from_marginal(&s.marginalize(0).unwrap(), 1).unwrap();
        assert_eq!(tb.recurrence(0), &rc);
        assert_eq!(tb.len(), 2);
    }

    #[test]
    fn two_atom_grid_recurrences() {
        let tb = TensorBasis::total_degree(&grid_2d_pm1(), 1).unwrap();
        for i in 0..2 {
            assert!(tb.recurrence(i).a(1).abs() < 1e-15);
            assert!((tb.recurrence(i).b(1) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn determinacy_error_names_dimension() {
        // Dimension 0 has 3 distinct values, dimension 1 only 2.
        let s = EmpiricalSampleSet::new(
            vec![-1.0, -1.0, 0.0, 1.0, 1.0, -1.0, 0.5, 1.0],
            2,
            None,
        )
        .unwrap();
        match TensorBasis::total_degree(&s, 2).unwrap_err() {
            TensorError::Dimension { dim, source } => {
                assert_eq!(dim, 1);
                assert!(matches!(
                    source,
                    BasisError::InsufficientDistinctSamples { .. }
                ));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn constant_only_basis() {
        let s = three_atom_1d();
        let tb = TensorBasis::total_degree(&s, 0).unwrap();
        assert_eq!(tb.evaluate(&[0.37]), vec![1.0]);
        assert_eq!(tb.christoffel(&[123.0]), 1.0);
    }

    #[test]
    fn grid_basis_at_corner() {
        let tb = TensorBasis::total_degree(&grid_2d_pm1(), 1).unwrap();
        // Indices ((0,0),(0,1),(1,0)); phi_1(1) = 1 from the 2-atom family.
        let phi = tb.evaluate(&[1.0, 1.0]);
        assert_eq!(phi.len(), 3);
        for v in phi {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn separability_of_products() {
        let s = EmpiricalSampleSet::new(
            vec![
                -0.9, 0.2, -0.4, -0.7, 0.0, 0.5, 0.3, -0.2, 0.8, 0.9, -0.6, 0.1,
            ],
            2,
            None,
        )
        .unwrap();
        let tb = TensorBasis::total_degree(&s, 2).unwrap();
        let z = [0.31, -0.47];
        let phi = tb.evaluate(&z);
        let sweep0 = tb.recurrence(0).evaluate(z[0], 2);
        let sweep1 = tb.recurrence(1).evaluate(z[1], 2);
        for (j, lambda) in tb.index_set().iter().enumerate() {
            let direct = sweep0[lambda[0] as usize] * sweep1[lambda[1] as usize];
            assert!((phi[j] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn christoffel_three_atom_value() {
        // kappa(1) = (1/2)(1 + 3/2) = 5/4 for the 3-atom degree-1 family.
        let tb = TensorBasis::total_degree(&three_atom_1d(), 1).unwrap();
        assert!((tb.christoffel(&[1.0]) - 1.25).abs() < 1e-12);
        assert!((tb.christoffel(&[0.0]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn christoffel_averages_to_one_over_atoms() {
        let s = three_atom_1d();
        let tb = TensorBasis::total_degree(&s, 1).unwrap();
        let mean: f64 = (0..s.len())
            .map(|j| tb.christoffel(s.point(j)))
            .sum::<f64>()
            / s.len() as f64;
        assert!((mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn multivariate_gram_is_identity_on_tensor_grid() {
        // 12 x 12 tensor grid in d = 2; the tensorial measure is the product
        // of the uniform marginals, so the Gram over the full grid must be
        // the identity.
        let pts_x: Vec<f64> = (0..12).map(|i| -1.0 + 2.0 * (i as f64) / 11.0).collect();
        let pts_y: Vec<f64> = (0..12).map(|i| (-1.0f64 + 2.0 * (i as f64) / 11.0).powi(3)).collect();
        let mut coords = Vec::new();
        for &x in &pts_x {
            for &y in &pts_y {
                coords.push(x);
                coords.push(y);
            }
        }
        let s = EmpiricalSampleSet::new(coords, 2, None).unwrap();
        let tb = TensorBasis::total_degree(&s, 4).unwrap();
        let n = tb.len();
        let mut gram = vec![0.0; n * n];
        // Integrate over the tensor grid of marginal atoms. The marginals of
        // the full grid repeat each atom 12 times, which only rescales the
        // uniform weights, so summing over the grid itself is the nu-sum.
        let q = s.len() as f64;
        for j in 0..s.len() {
            let phi = tb.evaluate(s.point(j));
            for a in 0..n {
                for b in 0..n {
                    gram[a * n + b] += phi[a] * phi[b] / q;
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (gram[a * n + b] - expected).abs() < 1e-8,
                    "Gram[{a}][{b}] = {}",
                    gram[a * n + b]
                );
            }
        }
    }
}

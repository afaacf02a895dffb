//! Weighted empirical sample sets: ingestion, validation, marginalization,
//! and raw moments of the discrete marginals.
//!
//! A sample set is the only description of the unknown input distribution
//! the rest of the pipeline ever sees. Weights are normalized to sum to one
//! on construction; marginals always carry uniform `1/Q` weights, which is
//! what the tensorized basis construction expects. The original weights
//! remain available through [`EmpiricalSampleSet::marginalize_weighted`]
//! for the univariate-only workflow.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use thiserror::Error;

use crate::linalg::pairwise_sum;

/// Errors from loading or validating sample data.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("empty input: no data rows found")]
    Empty,
    #[error("ragged row {row}: expected {expected} columns, got {got}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("row {row}, column {col}: cannot parse {text:?} as a number")]
    Parse { row: usize, col: usize, text: String },
    #[error("row {row}, column {col}: non-finite value")]
    NonFinite { row: usize, col: usize },
    #[error("negative weight at row {row}")]
    NegativeWeight { row: usize },
    #[error("weights sum to zero: nothing to normalize")]
    ZeroWeightMass,
    #[error("need at least one coordinate column")]
    NoCoordinates,
    #[error("dimension index {index} out of range for {dim}-dimensional data")]
    DimensionOutOfRange { index: usize, dim: usize },
    #[error("moment of order {order} overflowed to a non-finite value")]
    MomentOverflow { order: usize },
}

/// `Q` weighted points in `d` dimensions.
#[derive(Debug, Clone)]
pub struct EmpiricalSampleSet {
    points: Vec<f64>, // row-major Q x d
    weights: Vec<f64>,
    dim: usize,
}

impl EmpiricalSampleSet {
    /// Builds a set from row-major coordinates. `weights = None` assigns
    /// uniform `1/Q`; otherwise weights are validated (non-negative, not
    /// all zero) and normalized to sum to one.
    pub fn new(
        points: Vec<f64>,
        dim: usize,
        weights: Option<Vec<f64>>,
    ) -> Result<Self, DataError> {
        if dim == 0 {
            return Err(DataError::NoCoordinates);
        }
        if points.is_empty() || points.len() % dim != 0 {
            return Err(DataError::Empty);
        }
        let count = points.len() / dim;
        for (idx, v) in points.iter().enumerate() {
            if !v.is_finite() {
                return Err(DataError::NonFinite {
                    row: idx / dim,
                    col: idx % dim,
                });
            }
        }
        let weights = match weights {
            Some(w) => {
                debug_assert_eq!(w.len(), count);
                normalize_weights(w)?
            }
            None => vec![1.0 / count as f64; count],
        };
        Ok(Self {
            points,
            weights,
            dim,
        })
    }

    /// Loads a CSV file: one point per line, `d` comma-separated
    /// coordinates, `#`-prefixed comment lines and blank lines skipped.
    /// With `weighted = true` the last column is read as the point weight.
    pub fn from_csv_path(path: impl AsRef<Path>, weighted: bool) -> Result<Self, DataError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_csv_reader(BufReader::new(file), weighted)
    }

    /// Same as [`Self::from_csv_path`] but from any reader.
    pub fn from_csv_reader<R: Read>(reader: R, weighted: bool) -> Result<Self, DataError> {
        let reader = BufReader::new(reader);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut columns = None;
        let mut row = 0usize;
        for line in reader.lines() {
            let line = line.map_err(|source| DataError::Io {
                path: "<reader>".to_string(),
                source,
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            let ncols = *columns.get_or_insert(fields.len());
            if fields.len() != ncols {
                return Err(DataError::RaggedRow {
                    row,
                    expected: ncols,
                    got: fields.len(),
                });
            }
            let mut values = Vec::with_capacity(ncols);
            for (col, field) in fields.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| DataError::Parse {
                    row,
                    col,
                    text: (*field).to_string(),
                })?;
                if !v.is_finite() {
                    return Err(DataError::NonFinite { row, col });
                }
                values.push(v);
            }
            if weighted {
                let w = values.pop().expect("at least one column");
                if w < 0.0 {
                    return Err(DataError::NegativeWeight { row });
                }
                weights.push(w);
            }
            if values.is_empty() {
                return Err(DataError::NoCoordinates);
            }
            points.extend_from_slice(&values);
            row += 1;
        }
        if row == 0 {
            return Err(DataError::Empty);
        }
        let dim = points.len() / row;
        Self::new(points, dim, weighted.then_some(weights))
    }

    /// Number of points `Q`.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    /// True when the set holds no points. Construction forbids this; the
    /// method exists for the usual `len`/`is_empty` pairing.
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coordinates of point `j`.
    pub fn point(&self, j: usize) -> &[f64] {
        &self.points[j * self.dim..(j + 1) * self.dim]
    }

    /// All coordinates, row-major `Q x d`.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Normalized weights.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Coordinate slice along dimension `index` with uniform `1/Q` weights,
    /// in original point order. The set's own weights are deliberately
    /// ignored here; use [`Self::marginalize_weighted`] to keep them.
    pub fn marginalize(&self, index: usize) -> Result<UnivariateMarginal, DataError> {
        let values = self.coordinate_slice(index)?;
        let q = values.len();
        Ok(UnivariateMarginal {
            values,
            weights: vec![1.0 / q as f64; q],
        })
    }

    /// Coordinate slice along dimension `index` carrying the set's own
    /// normalized weights.
    pub fn marginalize_weighted(&self, index: usize) -> Result<UnivariateMarginal, DataError> {
        let values = self.coordinate_slice(index)?;
        Ok(UnivariateMarginal {
            values,
            weights: self.weights.clone(),
        })
    }

    fn coordinate_slice(&self, index: usize) -> Result<Vec<f64>, DataError> {
        if index >= self.dim {
            return Err(DataError::DimensionOutOfRange {
                index,
                dim: self.dim,
            });
        }
        Ok((0..self.len())
            .map(|j| self.points[j * self.dim + index])
            .collect())
    }

    /// Per-dimension `(min, max)` of the coordinates.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim];
        for j in 0..self.len() {
            for (i, b) in bounds.iter_mut().enumerate() {
                let v = self.points[j * self.dim + i];
                b.0 = b.0.min(v);
                b.1 = b.1.max(v);
            }
        }
        bounds
    }
}

fn normalize_weights(weights: Vec<f64>) -> Result<Vec<f64>, DataError> {
    for (row, w) in weights.iter().enumerate() {
        if !w.is_finite() {
            return Err(DataError::NonFinite { row, col: usize::MAX });
        }
        if *w < 0.0 {
            return Err(DataError::NegativeWeight { row });
        }
    }
    let total = pairwise_sum(&weights);
    if total <= 0.0 {
        return Err(DataError::ZeroWeightMass);
    }
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// One coordinate slice of a sample set together with its weights.
#[derive(Debug, Clone)]
pub struct UnivariateMarginal {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl UnivariateMarginal {
    /// Builds a marginal directly from values and (non-negative) weights,
    /// normalizing the weights to sum to one. Entry point for the
    /// univariate-only workflow where the data never passes through a
    /// multivariate set.
    pub fn from_weighted(values: Vec<f64>, weights: Vec<f64>) -> Result<Self, DataError> {
        if values.is_empty() {
            return Err(DataError::Empty);
        }
        debug_assert_eq!(values.len(), weights.len());
        for (row, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(DataError::NonFinite { row, col: 0 });
            }
        }
        let weights = normalize_weights(weights)?;
        Ok(Self { values, weights })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of distinct values, by exact float equality. This is the
    /// quantity that decides whether a degree-`K` construction is
    /// determinate (it needs at least `K + 1` distinct values).
    pub fn distinct_values(&self) -> usize {
        let mut sorted = self.values.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        sorted.len()
    }

    /// Raw moments `nu_k = sum_j w_j xi_j^k` for `k = 0..=max_order`,
    /// accumulated pairwise in sample order. `nu_0` is exactly one by
    /// construction (the weights are normalized).
    pub fn raw_moments(&self, max_order: usize) -> Result<Vec<f64>, DataError> {
        let q = self.values.len();
        let mut moments = Vec::with_capacity(max_order + 1);
        moments.push(1.0);
        let mut powers = vec![1.0; q];
        let mut terms = vec![0.0; q];
        for order in 1..=max_order {
            for j in 0..q {
                powers[j] *= self.values[j];
                terms[j] = self.weights[j] * powers[j];
            }
            let nu = pairwise_sum(&terms);
            if !nu.is_finite() {
                return Err(DataError::MomentOverflow { order });
            }
            moments.push(nu);
        }
        Ok(moments)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_without_weights_assigns_uniform() {
        let csv = "-1\n0\n1\n";
        let s = EmpiricalSampleSet::from_csv_reader(csv.as_bytes(), false).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.dim(), 1);
        for w in s.weights() {
            assert!((w - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn load_normalizes_weight_column() {
        let csv = "0.0, 2\n1.0, 2\n2.0, 4\n";
        let s = EmpiricalSampleSet::from_csv_reader(csv.as_bytes(), true).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.weights(), &[0.25, 0.25, 0.5]);
    }

    #[test]
    fn load_rejects_negative_weight() {
        let csv = "0.0, 1\n1.0, -1\n";
        let err = EmpiricalSampleSet::from_csv_reader(csv.as_bytes(), true).unwrap_err();
        assert!(matches!(err, DataError::NegativeWeight { row: 1 }));
        assert!(err.to_string().contains("negative weight at row 1"));
    }

    #[test]
    fn load_rejects_ragged_and_non_numeric_rows() {
        let ragged = "1,2\n3\n";
        assert!(matches!(
            EmpiricalSampleSet::from_csv_reader(ragged.as_bytes(), false).unwrap_err(),
            DataError::RaggedRow { row: 1, expected: 2, got: 1 }
        ));
        let bad = "1,2\n3,abc\n";
        match EmpiricalSampleSet::from_csv_reader(bad.as_bytes(), false).unwrap_err() {
            DataError::Parse { row, col, text } => {
                assert_eq!((row, col), (1, 1));
                assert_eq!(text, "abc");
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(matches!(
            EmpiricalSampleSet::from_csv_reader("".as_bytes(), false).unwrap_err(),
            DataError::Empty
        ));
    }

    #[test]
    fn comments_and_exponent_notation_are_handled() {
        let csv = "# header comment\n1.0e-1, 2.5E+1\n\n-3e0, 4\n";
        let s = EmpiricalSampleSet::from_csv_reader(csv.as_bytes(), false).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.point(0), &[0.1, 25.0]);
        assert_eq!(s.point(1), &[-3.0, 4.0]);
    }

    #[test]
    fn marginalize_slices_in_order_and_uniformizes_weights() {
        let s = EmpiricalSampleSet::new(vec![1.0, 2.0, 3.0, 4.0], 2, None).unwrap();
        let m0 = s.marginalize(0).unwrap();
        assert_eq!(m0.values(), &[1.0, 3.0]);
        assert_eq!(m0.weights(), &[0.5, 0.5]);
        let m1 = s.marginalize(1).unwrap();
        assert_eq!(m1.values(), &[2.0, 4.0]);
    }

    #[test]
    fn marginalize_ignores_nonuniform_weights() {
        let s =
            EmpiricalSampleSet::new(vec![1.0, 2.0, 3.0, 4.0], 2, Some(vec![0.9, 0.1])).unwrap();
        let m = s.marginalize(0).unwrap();
        assert_eq!(m.weights(), &[0.5, 0.5]);
        // The weighted variant keeps them.
        let mw = s.marginalize_weighted(0).unwrap();
        assert_eq!(mw.weights(), &[0.9, 0.1]);
    }

    #[test]
    fn marginalize_rejects_out_of_range_dimension() {
        let s = EmpiricalSampleSet::new(vec![1.0, 2.0], 2, None).unwrap();
        assert!(matches!(
            s.marginalize(2).unwrap_err(),
            DataError::DimensionOutOfRange { index: 2, dim: 2 }
        ));
    }

    #[test]
    fn moments_of_three_symmetric_atoms() {
        // Direct summation: (1, 0, 2/3, 0, 2/3).
        let m = UnivariateMarginal::from_weighted(vec![-1.0, 0.0, 1.0], vec![1.0; 3]).unwrap();
        let nu = m.raw_moments(4).unwrap();
        assert_eq!(nu[0], 1.0);
        assert!(nu[1].abs() < 1e-16);
        assert!((nu[2] - 2.0 / 3.0).abs() < 1e-15);
        assert!(nu[3].abs() < 1e-16);
        assert!((nu[4] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn moments_of_two_symmetric_atoms() {
        let m = UnivariateMarginal::from_weighted(vec![-1.0, 1.0], vec![1.0, 1.0]).unwrap();
        let nu = m.raw_moments(3).unwrap();
        assert_eq!(nu, vec![1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn moments_of_point_mass_at_zero() {
        let m = UnivariateMarginal::from_weighted(vec![0.0; 5], vec![1.0; 5]).unwrap();
        assert_eq!(m.raw_moments(3).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(m.distinct_values(), 1);
    }

    #[test]
    fn moment_overflow_is_reported() {
        let m = UnivariateMarginal::from_weighted(vec![1.0e200], vec![1.0]).unwrap();
        assert!(matches!(
            m.raw_moments(2).unwrap_err(),
            DataError::MomentOverflow { order: 2 }
        ));
    }

    #[test]
    fn load_pipeline_is_deterministic() {
        let csv = "0.125, 1\n-0.75, 2\n0.5, 1\n";
        let a = EmpiricalSampleSet::from_csv_reader(csv.as_bytes(), true).unwrap();
        let b = EmpiricalSampleSet::from_csv_reader(csv.as_bytes(), true).unwrap();
        let ma = a.marginalize(0).unwrap().raw_moments(8).unwrap();
        let mb = b.marginalize(0).unwrap().raw_moments(8).unwrap();
        assert_eq!(ma, mb, "identical files must give bit-identical moments");
    }
}

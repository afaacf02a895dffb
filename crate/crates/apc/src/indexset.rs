//! Ordered finite multi-index sets over `N_0^d`.
//!
//! The default generator is the total-degree set `{ |lambda|_1 <= k }`,
//! ordered graded-lexicographically: ascending total degree, ties broken by
//! lexicographic comparison of the index tuple. The ordering is pure integer
//! computation and therefore identical across runs and platforms; result
//! files reference coefficients by position in this ordering.

use thiserror::Error;

/// Hard cap on the number of basis elements a set may hold.
const MAX_CARDINALITY: u128 = 10_000_000;

#[derive(Debug, Error)]
pub enum IndexSetError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("total-degree set of dimension {dim} and degree {degree} has {cardinality} elements, above the {limit} limit")]
    TooLarge {
        dim: usize,
        degree: usize,
        cardinality: u128,
        limit: u128,
    },
    #[error("explicit index list is empty")]
    EmptyList,
    #[error("index {position} has {got} components, expected {expected}")]
    InconsistentDimension {
        position: usize,
        expected: usize,
        got: usize,
    },
}

/// How a [`MultiIndexSet`] was generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexSetKind {
    TotalDegree,
    ExplicitList,
}

/// An ordered list of multi-indices with a fixed bijection to `0..N`.
#[derive(Debug, Clone)]
pub struct MultiIndexSet {
    indices: Vec<u32>, // row-major N x d
    dim: usize,
    degree: usize, // max |lambda|_1 present
    kind: IndexSetKind,
}

impl MultiIndexSet {
    /// All multi-indices with `|lambda|_1 <= degree`, graded-lexicographic.
    pub fn total_degree(dim: usize, degree: usize) -> Result<Self, IndexSetError> {
        if dim == 0 {
            return Err(IndexSetError::ZeroDimension);
        }
        let cardinality = binomial(dim as u128 + degree as u128, dim as u128);
        match cardinality {
            Some(n) if n <= MAX_CARDINALITY => {}
            other => {
                return Err(IndexSetError::TooLarge {
                    dim,
                    degree,
                    cardinality: other.unwrap_or(u128::MAX),
                    limit: MAX_CARDINALITY,
                })
            }
        }
        let mut indices = Vec::new();
        let mut current = vec![0u32; dim];
        for total in 0..=degree {
            emit_fixed_total(&mut indices, &mut current, 0, total as u32);
        }
        Ok(Self {
            indices,
            dim,
            degree,
            kind: IndexSetKind::TotalDegree,
        })
    }

    /// Wraps an explicit list, preserving its order.
    pub fn from_indices(list: Vec<Vec<u32>>) -> Result<Self, IndexSetError> {
        let Some(first) = list.first() else {
            return Err(IndexSetError::EmptyList);
        };
        let dim = first.len();
        if dim == 0 {
            return Err(IndexSetError::ZeroDimension);
        }
        let mut indices = Vec::with_capacity(list.len() * dim);
        let mut degree = 0usize;
        for (position, lambda) in list.iter().enumerate() {
            if lambda.len() != dim {
                return Err(IndexSetError::InconsistentDimension {
                    position,
                    expected: dim,
                    got: lambda.len(),
                });
            }
            degree = degree.max(lambda.iter().map(|&v| v as usize).sum());
            indices.extend_from_slice(lambda);
        }
        Ok(Self {
            indices,
            dim,
            degree,
            kind: IndexSetKind::ExplicitList,
        })
    }

    /// Number of indices `N`.
    pub fn len(&self) -> usize {
        self.indices.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest total degree present.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> IndexSetKind {
        self.kind
    }

    /// The multi-index at ordered position `j`.
    pub fn index(&self, j: usize) -> &[u32] {
        &self.indices[j * self.dim..(j + 1) * self.dim]
    }

    /// Iterates indices in order.
    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.indices.chunks_exact(self.dim)
    }

    /// Largest entry appearing in coordinate `i` across the set.
    pub fn max_degree_in_dim(&self, i: usize) -> u32 {
        self.iter().map(|lambda| lambda[i]).max().unwrap_or(0)
    }

    /// True when every `lambda - e_j` (where defined) is also present.
    pub fn is_downward_closed(&self) -> bool {
        use std::collections::HashSet;
        let members: HashSet<&[u32]> = self.iter().collect();
        for lambda in self.iter() {
            for j in 0..self.dim {
                if lambda[j] > 0 {
                    let mut lower = lambda.to_vec();
                    lower[j] -= 1;
                    if !members.contains(lower.as_slice()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// CSV export, columns `index,l_0,...,l_{d-1}`, zero-based positions.
    pub fn to_csv(&self) -> String {
        let mut header = String::from("index");
        for i in 0..self.dim {
            header.push_str(&format!(",l_{i}"));
        }
        header.push('\n');
        let mut out = header;
        for (j, lambda) in self.iter().enumerate() {
            out.push_str(&j.to_string());
            for v in lambda {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

fn emit_fixed_total(out: &mut Vec<u32>, current: &mut [u32], dim: usize, remaining: u32) {
    if dim + 1 == current.len() {
        current[dim] = remaining;
        out.extend_from_slice(current);
        return;
    }
    for v in 0..=remaining {
        current[dim] = v;
        emit_fixed_total(out, current, dim + 1, remaining - v);
    }
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 0..k {
        result = result.checked_mul(n - i)?;
        result /= i + 1;
    }
    Some(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_scale_cardinalities() {
        assert_eq!(MultiIndexSet::total_degree(2, 20).unwrap().len(), 231);
        assert_eq!(MultiIndexSet::total_degree(10, 3).unwrap().len(), 286);
    }

    #[test]
    fn graded_lex_order_small_case() {
        let s = MultiIndexSet::total_degree(2, 1).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.index(0), &[0, 0]);
        assert_eq!(s.index(1), &[0, 1]);
        assert_eq!(s.index(2), &[1, 0]);
    }

    #[test]
    fn ordering_is_graded_then_lexicographic() {
        let s = MultiIndexSet::total_degree(3, 4).unwrap();
        for j in 1..s.len() {
            let prev = s.index(j - 1);
            let curr = s.index(j);
            let grade_prev: u32 = prev.iter().sum();
            let grade_curr: u32 = curr.iter().sum();
            assert!(
                grade_prev < grade_curr || (grade_prev == grade_curr && prev < curr),
                "out of order at {j}: {prev:?} then {curr:?}"
            );
        }
    }

    #[test]
    fn total_degree_is_downward_closed() {
        assert!(MultiIndexSet::total_degree(3, 5).unwrap().is_downward_closed());
    }

    #[test]
    fn cardinality_guard_rejects_huge_sets() {
        assert!(matches!(
            MultiIndexSet::total_degree(30, 30).unwrap_err(),
            IndexSetError::TooLarge { .. }
        ));
    }

    #[test]
    fn explicit_list_preserves_order_and_checks_dims() {
        let s = MultiIndexSet::from_indices(vec![vec![2, 0], vec![0, 0]]).unwrap();
        assert_eq!(s.index(0), &[2, 0]);
        assert_eq!(s.degree(), 2);
        assert_eq!(s.kind(), IndexSetKind::ExplicitList);
        assert!(MultiIndexSet::from_indices(vec![vec![1], vec![1, 2]]).is_err());
    }

    #[test]
    fn max_degree_per_dim() {
        let s = MultiIndexSet::total_degree(2, 3).unwrap();
        assert_eq!(s.max_degree_in_dim(0), 3);
        assert_eq!(s.max_degree_in_dim(1), 3);
    }
}

//! Subsample plans: induced-measure draws, Monte Carlo draws, and the
//! product-Chebyshev (arcsine) equilibrium baseline.
//!
//! The induced discrete measure reweights the sample cloud by the
//! normalized Christoffel function; drawing from it and preconditioning
//! rows by `W = 1/kappa` keeps every entry of the scaled measurement
//! matrix bounded by `sqrt(N)`. Draws are made with replacement: the
//! estimator the preconditioning is built around assumes iid samples, and
//! deduplication would bias it. Every plan records the seed that produced
//! it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::basis::TensorBasis;
use crate::data::EmpiricalSampleSet;
use crate::linalg::pairwise_sum;
use crate::par;

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("subsample count must be at least 1")]
    EmptyPlan,
    #[error("degenerate bounds in dimension {dim}: lo = hi = {value}")]
    DegenerateBounds { dim: usize, value: f64 },
    #[error("bounds dimension {got} does not match basis dimension {expected}")]
    BoundsDimensionMismatch { expected: usize, got: usize },
    #[error("basis dimension {basis_dim} does not match data dimension {data_dim}")]
    DimensionMismatch { basis_dim: usize, data_dim: usize },
}

/// Which sampler produced a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    /// Christoffel-induced discrete measure on the sample cloud.
    Induced,
    /// Monte Carlo from the cloud with its own weights, unpreconditioned.
    Mc,
    /// Product-Chebyshev (arcsine) draws on the data's bounding box.
    Equilibrium,
}

impl SamplerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplerKind::Induced => "induced",
            SamplerKind::Mc => "mc",
            SamplerKind::Equilibrium => "equilibrium",
        }
    }
}

impl std::fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SamplerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "induced" => Ok(SamplerKind::Induced),
            "mc" | "monte-carlo" | "montecarlo" => Ok(SamplerKind::Mc),
            "equilibrium" | "csa" => Ok(SamplerKind::Equilibrium),
            other => Err(format!(
                "unknown sampler {other:?} (expected induced, mc, or equilibrium)"
            )),
        }
    }
}

/// The Christoffel-induced discrete measure on the atoms of a sample set.
#[derive(Debug, Clone)]
pub struct InducedDiscreteMeasure {
    atoms: Vec<f64>, // row-major Q x d
    dim: usize,
    kappa: Vec<f64>,         // raw Christoffel values per atom
    probabilities: Vec<f64>, // normalized
    cumulative: Vec<f64>,    // prefix sums ending at exactly 1
}

impl InducedDiscreteMeasure {
    /// Computes `kappa` at every atom of `data` under `basis`, normalizes
    /// to probabilities, and builds the inverse-transform table.
    pub fn new(
        basis: &TensorBasis,
        data: &EmpiricalSampleSet,
    ) -> Result<Self, SamplingError> {
        if basis.dim() != data.dim() {
            return Err(SamplingError::DimensionMismatch {
                basis_dim: basis.dim(),
                data_dim: data.dim(),
            });
        }
        let q = data.len();
        let kappa = par::map_indices(q, |j| basis.christoffel(data.point(j)));
        let total = pairwise_sum(&kappa);
        let probabilities: Vec<f64> = kappa.iter().map(|k| k / total).collect();
        let mut cumulative = Vec::with_capacity(q);
        let mut acc = 0.0;
        for p in &probabilities {
            acc += p;
            cumulative.push(acc);
        }
        // Inverse transform must never fall off the table end.
        cumulative[q - 1] = 1.0;
        Ok(Self {
            atoms: data.points().to_vec(),
            dim: data.dim(),
            kappa,
            probabilities,
            cumulative,
        })
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    fn atom(&self, j: usize) -> &[f64] {
        &self.atoms[j * self.dim..(j + 1) * self.dim]
    }

    fn draw_row(&self, u: f64) -> usize {
        self.cumulative.partition_point(|&c| c <= u)
    }
}

/// `M` selected points with preconditioning weights and provenance.
#[derive(Debug, Clone)]
pub struct SubsamplePlan {
    points: Vec<f64>, // row-major M x d
    dim: usize,
    precondition_weights: Vec<f64>,
    sampler: SamplerKind,
    seed: u64,
    source_rows: Vec<Option<usize>>,
}

impl SubsamplePlan {
    pub fn len(&self) -> usize {
        self.precondition_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.precondition_weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `W_i`: `1/kappa` for induced and equilibrium plans, 1 for MC.
    pub fn precondition_weights(&self) -> &[f64] {
        &self.precondition_weights
    }

    pub fn sampler(&self) -> SamplerKind {
        self.sampler
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Index of each point in the source cloud; `None` for equilibrium
    /// points, which generally lie outside it.
    pub fn source_rows(&self) -> &[Option<usize>] {
        &self.source_rows
    }

    /// CSV export: `row,z_0..z_{d-1},w,source_row` with -1 for points not
    /// taken from the cloud.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row");
        for i in 0..self.dim {
            out.push_str(&format!(",z_{i}"));
        }
        out.push_str(",w,source_row\n");
        for i in 0..self.len() {
            out.push_str(&i.to_string());
            for v in self.point(i) {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push(',');
            out.push_str(&self.precondition_weights[i].to_string());
            out.push(',');
            match self.source_rows[i] {
                Some(r) => out.push_str(&r.to_string()),
                None => out.push_str("-1"),
            }
            out.push('\n');
        }
        out
    }
}

/// `M` iid draws from the induced measure by inverse-transform sampling,
/// preconditioned by `W_i = 1/kappa(z_i)`. Deterministic given the seed.
pub fn draw_induced(
    measure: &InducedDiscreteMeasure,
    m: usize,
    seed: u64,
) -> Result<SubsamplePlan, SamplingError> {
    if m == 0 {
        return Err(SamplingError::EmptyPlan);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let dim = measure.dim;
    let mut points = Vec::with_capacity(m * dim);
    let mut weights = Vec::with_capacity(m);
    let mut source_rows = Vec::with_capacity(m);
    for _ in 0..m {
        let u: f64 = rng.random();
        let row = measure.draw_row(u);
        points.extend_from_slice(measure.atom(row));
        weights.push(1.0 / measure.kappa[row]);
        source_rows.push(Some(row));
    }
    Ok(SubsamplePlan {
        points,
        dim,
        precondition_weights: weights,
        sampler: SamplerKind::Induced,
        seed,
        source_rows,
    })
}

/// `M` iid draws from the sample set under its own weights, with unit
/// preconditioning (the plain Monte Carlo baseline).
pub fn draw_mc(
    data: &EmpiricalSampleSet,
    m: usize,
    seed: u64,
) -> Result<SubsamplePlan, SamplingError> {
    if m == 0 {
        return Err(SamplingError::EmptyPlan);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let q = data.len();
    let mut cumulative = Vec::with_capacity(q);
    let mut acc = 0.0;
    for &w in data.weights() {
        acc += w;
        cumulative.push(acc);
    }
    cumulative[q - 1] = 1.0;
    let dim = data.dim();
    let mut points = Vec::with_capacity(m * dim);
    let mut source_rows = Vec::with_capacity(m);
    for _ in 0..m {
        let u: f64 = rng.random();
        let row = cumulative.partition_point(|&c| c <= u);
        points.extend_from_slice(data.point(row));
        source_rows.push(Some(row));
    }
    Ok(SubsamplePlan {
        points,
        dim,
        precondition_weights: vec![1.0; m],
        sampler: SamplerKind::Mc,
        seed,
        source_rows,
    })
}

/// `M` draws from the product-Chebyshev (arcsine) measure fitted to
/// per-dimension bounds: each coordinate is `mid + half*cos(pi*u)` with
/// `u` uniform. Points generally do not belong to the sample cloud;
/// preconditioning uses the same `W = 1/kappa` as induced plans.
pub fn draw_equilibrium(
    basis: &TensorBasis,
    bounds: &[(f64, f64)],
    m: usize,
    seed: u64,
) -> Result<SubsamplePlan, SamplingError> {
    if m == 0 {
        return Err(SamplingError::EmptyPlan);
    }
    if bounds.len() != basis.dim() {
        return Err(SamplingError::BoundsDimensionMismatch {
            expected: basis.dim(),
            got: bounds.len(),
        });
    }
    for (dim, &(lo, hi)) in bounds.iter().enumerate() {
        if !(lo < hi) {
            return Err(SamplingError::DegenerateBounds { dim, value: lo });
        }
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let dim = basis.dim();
    let mut points = Vec::with_capacity(m * dim);
    for _ in 0..m {
        for &(lo, hi) in bounds {
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            let u: f64 = rng.random();
            points.push(mid + half * (std::f64::consts::PI * u).cos());
        }
    }
    let weights: Vec<f64> = points
        .chunks_exact(dim)
        .map(|z| 1.0 / basis.christoffel(z))
        .collect();
    Ok(SubsamplePlan {
        points,
        dim,
        precondition_weights: weights,
        sampler: SamplerKind::Equilibrium,
        seed,
        source_rows: vec![None; m],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::TensorBasis;

    fn three_atom_set() -> EmpiricalSampleSet {
        EmpiricalSampleSet::new(vec![-1.0, 0.0, 1.0], 1, None).unwrap()
    }

    #[test]
    fn constant_basis_induces_uniform_measure() {
        let s = three_atom_set();
        let tb = TensorBasis::total_degree(&s, 0).unwrap();
        let mu = InducedDiscreteMeasure::new(&tb, &s).unwrap();
        for p in mu.probabilities() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn three_atom_induced_probabilities() {
        // kappa = (5/4, 1/2, 5/4) -> normalized (5/12, 1/6, 5/12).
        let s = three_atom_set();
        let tb = TensorBasis::total_degree(&s, 1).unwrap();
        let mu = InducedDiscreteMeasure::new(&tb, &s).unwrap();
        let p = mu.probabilities();
        assert!((p[0] - 5.0 / 12.0).abs() < 1e-14);
        assert!((p[1] - 1.0 / 6.0).abs() < 1e-14);
        assert!((p[2] - 5.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn induced_probabilities_sum_to_one() {
        let coords: Vec<f64> = (0..60).map(|i| ((i * 37 % 61) as f64 / 30.0) - 1.0).collect();
        let s = EmpiricalSampleSet::new(coords, 2, None).unwrap();
        let tb = TensorBasis::total_degree(&s, 6).unwrap();
        let mu = InducedDiscreteMeasure::new(&tb, &s).unwrap();
        let total: f64 = mu.probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn induced_middle_atom_frequency() {
        // Middle atom carries probability 1/6; at M = 1e5 the observed
        // frequency should land within 0.01.
        let s = three_atom_set();
        let tb = TensorBasis::total_degree(&s, 1).unwrap();
        let mu = InducedDiscreteMeasure::new(&tb, &s).unwrap();
        let plan = draw_induced(&mu, 100_000, 7).unwrap();
        let middle = plan
            .source_rows()
            .iter()
            .filter(|r| **r == Some(1))
            .count() as f64
            / plan.len() as f64;
        assert!((middle - 1.0 / 6.0).abs() < 0.01, "frequency {middle}");
    }

    #[test]
    fn induced_uniform_case_matches_binomial_bounds() {
        let s = three_atom_set();
        let tb = TensorBasis::total_degree(&s, 0).unwrap();
        let mu = InducedDiscreteMeasure::new(&tb, &s).unwrap();
        let m = 60_000;
        let plan = draw_induced(&mu, m, 11).unwrap();
        let p = 1.0 / 3.0;
        let sigma = (p * (1.0 - p) / m as f64).sqrt();
        for atom in 0..3 {
            let freq = plan
                .source_rows()
                .iter()
                .filter(|r| **r == Some(atom))
                .count() as f64
                / m as f64;
            assert!(
                (freq - p).abs() < 3.0 * sigma + 1e-12,
                "atom {atom} frequency {freq} outside 3 sigma"
            );
        }
    }

    #[test]
    fn plans_are_deterministic_given_seed() {
        let s = three_atom_set();
        let tb = TensorBasis::total_degree(&s, 1).unwrap();
        let mu = InducedDiscreteMeasure::new(&tb, &s).unwrap();
        let a = draw_induced(&mu, 500, 42).unwrap();
        let b = draw_induced(&mu, 500, 42).unwrap();
        assert_eq!(a.points(), b.points());
        assert_eq!(a.source_rows(), b.source_rows());
        let c = draw_mc(&s, 500, 42).unwrap();
        let d = draw_mc(&s, 500, 42).unwrap();
        assert_eq!(c.points(), d.points());
    }

    #[test]
    fn mc_respects_input_weights() {
        let s = EmpiricalSampleSet::new(vec![0.0, 1.0], 1, Some(vec![0.9, 0.1])).unwrap();
        let plan = draw_mc(&s, 10_000, 3).unwrap();
        let first = plan
            .source_rows()
            .iter()
            .filter(|r| **r == Some(0))
            .count() as f64
            / plan.len() as f64;
        assert!((first - 0.9).abs() < 0.01, "frequency {first}");
        assert!(plan.precondition_weights().iter().all(|&w| w == 1.0));
    }

    #[test]
    fn induced_points_are_atoms_of_the_cloud() {
        let s = three_atom_set();
        let tb = TensorBasis::total_degree(&s, 1).unwrap();
        let mu = InducedDiscreteMeasure::new(&tb, &s).unwrap();
        let plan = draw_induced(&mu, 200, 5).unwrap();
        for i in 0..plan.len() {
            let row = plan.source_rows()[i].unwrap();
            assert_eq!(plan.point(i), s.point(row));
            let expected_w = 1.0 / tb.christoffel(s.point(row));
            assert!((plan.precondition_weights()[i] - expected_w).abs() < 1e-15);
        }
    }

    #[test]
    fn equilibrium_marginals_follow_arcsine_law() {
        let s = three_atom_set();
        let tb = TensorBasis::total_degree(&s, 1).unwrap();
        let m = 100_000;
        let plan = draw_equilibrium(&tb, &[(-1.0, 1.0)], m, 19).unwrap();
        // Map each draw back through the arcsine CDF; the result must be
        // uniform. Chi-square on 20 equal bins, 1% level: chi2_{19,0.99}.
        let mut counts = [0usize; 20];
        for i in 0..m {
            let z = plan.point(i)[0];
            assert!((-1.0..=1.0).contains(&z));
            let u = 1.0 - z.clamp(-1.0, 1.0).acos() / std::f64::consts::PI;
            let bin = ((u * 20.0) as usize).min(19);
            counts[bin] += 1;
        }
        let expected = m as f64 / 20.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 36.19, "chi-square statistic {chi2} at 1% level");
        // Symmetric bounds: mean within 3 sigma of zero. Arcsine variance
        // on [-1,1] is 1/2.
        let mean: f64 = (0..m).map(|i| plan.point(i)[0]).sum::<f64>() / m as f64;
        let sigma = (0.5 / m as f64).sqrt();
        assert!(mean.abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn equilibrium_stays_in_box_and_flags_no_source() {
        let s = EmpiricalSampleSet::new(
            vec![-0.5, 2.0, 0.5, 3.0, 0.0, 2.5, -0.4, 2.2],
            2,
            None,
        )
        .unwrap();
        let tb = TensorBasis::total_degree(&s, 1).unwrap();
        let bounds = s.bounding_box();
        let plan = draw_equilibrium(&tb, &bounds, 2_000, 23).unwrap();
        for i in 0..plan.len() {
            let z = plan.point(i);
            for (c, &(lo, hi)) in z.iter().zip(&bounds) {
                assert!(*c >= lo - 1e-12 && *c <= hi + 1e-12);
            }
            assert!(plan.source_rows()[i].is_none());
        }
    }

    #[test]
    fn degenerate_bounds_are_rejected() {
        let s = three_atom_set();
        let tb = TensorBasis::total_degree(&s, 1).unwrap();
        assert!(matches!(
            draw_equilibrium(&tb, &[(0.5, 0.5)], 10, 1).unwrap_err(),
            SamplingError::DegenerateBounds { dim: 0, .. }
        ));
    }

    #[test]
    fn unbiasedness_of_induced_estimator() {
        // (1/M) sum_i g(z_i) / (Q * kappa_tilde(z_i)) estimates the uniform
        // atom average of g. Tested with g = coordinate projection.
        let coords: Vec<f64> = (0..50)
            .map(|i| -1.0 + 2.0 * (i as f64) / 49.0 + 0.002 * (i as f64).cos())
            .collect();
        let s = EmpiricalSampleSet::new(coords.clone(), 1, None).unwrap();
        let tb = TensorBasis::total_degree(&s, 5).unwrap();
        let mu = InducedDiscreteMeasure::new(&tb, &s).unwrap();
        let q = s.len() as f64;
        let target: f64 = coords.iter().sum::<f64>() / q;
        let m = 100_000;
        let plan = draw_induced(&mu, m, 31).unwrap();
        let per_draw: Vec<f64> = (0..m)
            .map(|i| {
                let row = plan.source_rows()[i].unwrap();
                plan.point(i)[0] / (q * mu.probabilities()[row])
            })
            .collect();
        let mean: f64 = per_draw.iter().sum::<f64>() / m as f64;
        let var: f64 =
            per_draw.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m as f64 - 1.0);
        let se = (var / m as f64).sqrt();
        assert!(
            (mean - target).abs() < 3.0 * se + 1e-12,
            "estimator {mean} vs target {target} (se {se})"
        );
    }
}

//! Data-driven polynomial chaos surrogates from empirical samples.
//!
//! Given a weighted point cloud describing an otherwise unknown input
//! distribution, this crate constructs orthonormal polynomial bases by
//! moment matching (Hankel/Cholesky recurrence extraction), subsamples the
//! cloud from the Christoffel-induced discrete measure, and recovers sparse
//! expansion coefficients through preconditioned equality-constrained
//! `l1` minimization.
//!
//! The pipeline, end to end:
//!
//! 1. [`data`] — load and validate a weighted sample set, marginalize it per
//!    coordinate, and compute raw moments of the discrete marginals.
//! 2. [`recurrence`] — turn moments into three-term recurrence coefficients
//!    via the Hankel moment matrix and its Cholesky factor; evaluate the
//!    resulting orthonormal polynomials stably.
//! 3. [`indexset`] / [`basis`] — total-degree multi-index sets, the
//!    tensor-product multivariate basis, and the normalized Christoffel
//!    function.
//! 4. [`sampling`] — draw subsample plans from the induced discrete measure,
//!    plain Monte Carlo, or the product-Chebyshev (arcsine) baseline, with
//!    preconditioning weights attached.
//! 5. [`solver`] — assemble the measurement system and solve basis pursuit
//!    with an operator-splitting method, cross-checkable against a dense LP.
//! 6. [`experiments`] — seeded, reproducible recovery and approximation
//!    experiments over synthetic or file-backed distributions.
//!
//! Batch loops (matrix assembly, Christoffel sweeps, experiment trials) run
//! on rayon when the default `parallel` feature is enabled and fall back to
//! sequential execution without it; results are bit-identical either way.

pub mod basis;
pub mod data;
pub mod experiments;
pub mod indexset;
pub mod linalg;
pub mod par;
pub mod recurrence;
pub mod report;
pub mod sampling;
pub mod solver;

pub use basis::TensorBasis;
pub use data::{EmpiricalSampleSet, UnivariateMarginal};
pub use indexset::MultiIndexSet;
pub use recurrence::{HankelMoments, RecurrenceCoefficients};
pub use sampling::{InducedDiscreteMeasure, SamplerKind, SubsamplePlan};
pub use solver::{MeasurementSystem, SolveOptions, SparseSolution};

//! Data-parallel map helpers with a sequential fallback.
//!
//! All batch loops in this crate (measurement-matrix assembly, Christoffel
//! sweeps over sample clouds, experiment trials) go through these functions.
//! With the `parallel` feature (default) they run on rayon; without it they
//! run sequentially with identical results.
//!
//! Determinism contract: the map stage produces an index-ordered `Vec` and
//! every reduction over it happens afterwards, sequentially, in index order.
//! Output is therefore bit-identical across thread counts and across the
//! parallel/sequential builds.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, returning results in index order.
#[cfg(feature = "parallel")]
pub fn map_indices<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Maps `f` over `0..n`, returning results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indices<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    map_indices_seq(n, f)
}

/// Sequential variant of [`map_indices`], always available. Benches compare
/// this against the parallel path on the same workloads.
pub fn map_indices_seq<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Maps `f` over a slice, returning results in element order.
#[cfg(feature = "parallel")]
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Maps `f` over a slice, returning results in element order.
#[cfg(not(feature = "parallel"))]
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_slice_seq(items, f)
}

/// Sequential variant of [`map_slice`], always available.
pub fn map_slice_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

//! Data-parallel map helpers with a sequential fallback.
//!
//! Independent Monte Carlo runs and batch evaluations go through
//! [`par_map`]; with the `parallel` feature enabled it fans out over the
//! rayon pool, otherwise it runs sequentially. Output order matches input
//! order in both cases, so results are identical.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Sequential map with the same signature as [`par_map`], kept available
/// unconditionally so benchmarks can compare both paths.
pub fn seq_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) these fan work out through rayon;
//! without it they run plain iterators. Both produce results in input order,
//! and every reduction in the crate picks winners by a total order on the
//! values, so results are identical across schedules and features.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map a function over owned items, preserving order.
#[cfg(feature = "parallel")]
pub fn map_vec<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

/// Map a function over owned items, preserving order.
#[cfg(not(feature = "parallel"))]
pub fn map_vec<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Map a fallible function over indices `0..n`, preserving order.
#[cfg(feature = "parallel")]
pub fn map_indices<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Map a fallible function over indices `0..n`, preserving order.
#[cfg(not(feature = "parallel"))]
pub fn map_indices<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// True when the parallel code paths are compiled in.
pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

//! Index-parallel map with a sequential fallback.
//!
//! With the `parallel` feature the closure runs on the rayon pool; without
//! it the same closure runs in a plain loop. Output order always follows the
//! index order, which is what keeps downstream reductions deterministic.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluate `f` on every index in `range`, returning results in index order.
#[cfg(feature = "parallel")]
pub fn map_range<T, F>(range: Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    range.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<T, F>(range: Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    range.map(f).collect()
}

/// Evaluate `f` on every element of `items`, preserving order.
pub fn map_slice<'a, S, T, F>(items: &'a [S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&'a S) -> T + Sync + Send,
{
    map_range(0..items.len(), |i| f(&items[i]))
}

/// Whether this build runs loops on the rayon pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

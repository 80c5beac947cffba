//! Parallel dispatch. All data-parallel loops in the crate go through
//! `map_indexed`, which fans out over rayon when the `parallel` feature is on
//! (the default) and falls back to a plain sequential loop otherwise.
//!
//! Determinism contract: parallelism is map-only. Results come back in input
//! index order and every reduction over them is sequential, so outputs are
//! identical regardless of thread count or schedule.

use crate::error::Result;

/// Apply `f` to every index/item pair, collecting results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> Result<U> + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

/// Apply `f` to every index/item pair, collecting results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    F: Fn(usize, &T) -> Result<U>,
{
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

/// Always-sequential variant, kept for benchmark comparison against the
/// rayon path within one build.
pub fn map_indexed_seq<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    F: Fn(usize, &T) -> Result<U>,
{
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

/// Cap the global rayon pool at `threads`. Returns false when the pool was
/// already initialized (the cap then has no effect); callers should invoke
/// this before any parallel work. No-op without the `parallel` feature.
#[cfg(feature = "parallel")]
pub fn set_thread_cap(threads: usize) -> bool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .is_ok()
}

#[cfg(not(feature = "parallel"))]
pub fn set_thread_cap(_threads: usize) -> bool {
    true
}

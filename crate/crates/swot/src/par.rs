//! Data-parallel map helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) these fan out over rayon's current
//! thread pool; without it they are plain loops. Either way the output vector
//! is ordered by index, so callers that seed each item independently get
//! bit-identical results at any worker count.

/// Apply `f` to `0..n` and collect results in index order.
#[cfg(feature = "parallel")]
pub fn map_indices<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Apply `f` to `0..n` and collect results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indices<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Apply `f` to every element of `items`, preserving order.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    map_indices(items.len(), |i| f(&items[i]))
}

/// Run `body` on a dedicated pool with `workers` threads when the `parallel`
/// feature is on; otherwise just call it. `workers = 0` means "library
/// default" (rayon's global pool / sequential).
#[cfg(feature = "parallel")]
pub fn with_workers<R: Send>(workers: usize, body: impl FnOnce() -> R + Send) -> R {
    if workers == 0 {
        return body();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to build thread pool");
    pool.install(body)
}

/// Sequential build: the worker count has no effect.
#[cfg(not(feature = "parallel"))]
pub fn with_workers<R: Send>(_workers: usize, body: impl FnOnce() -> R + Send) -> R {
    body()
}

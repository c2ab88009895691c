//! Data-parallel helpers. With the `parallel` feature (default) work is spread over
//! the rayon pool; without it the same closures run sequentially. Results are
//! always returned in index order, so reductions over them are reproducible.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `(0..n).map(f).collect()`, possibly in parallel.
#[cfg(feature = "parallel")]
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Maps over a slice, preserving order.
#[cfg(feature = "parallel")]
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    items.iter().map(f).collect()
}

/// First index in `0..n` (lowest, not first-finished) for which `f` returns `Some`.
#[cfg(feature = "parallel")]
pub fn find_first<T, F>(n: u128, chunk: u128, f: F) -> Option<T>
where
    T: Send,
    F: Fn(u128) -> Option<T> + Sync + Send,
{
    let chunks = n.div_ceil(chunk);
    let mut lo = 0u128;
    // Scan in batches of chunks so an early hit stops the remaining work.
    let batch = (rayon::current_num_threads() as u128 * 4).max(1);
    while lo < chunks {
        let hi = (lo + batch).min(chunks);
        let hit = (lo as u64..hi as u64).into_par_iter().find_map_first(|c| {
            let start = c as u128 * chunk;
            let end = (start + chunk).min(n);
            (start..end).find_map(&f)
        });
        if hit.is_some() {
            return hit;
        }
        lo = hi;
    }
    None
}

#[cfg(not(feature = "parallel"))]
pub fn find_first<T, F>(n: u128, _chunk: u128, f: F) -> Option<T>
where
    T: Send,
    F: Fn(u128) -> Option<T> + Sync + Send,
{
    (0..n).find_map(f)
}

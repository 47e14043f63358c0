//! Data-parallel driver used by the sweep, the brute-force oracle, the
//! continuous scan and the simulator.
//!
//! With the `parallel` feature (default) the work fans out over rayon;
//! without it the same code runs on plain iterators. Results always come
//! back in input order, so stage semantics and output bytes do not depend
//! on scheduling.

#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_iter().map(f).collect()
}

/// Caps the rayon worker count from `CHEAPTALK_THREADS` when set. Returns
/// the applied cap. Without the `parallel` feature this is a no-op.
pub fn configure_threads_from_env() -> Option<usize> {
    let n: usize = std::env::var("CHEAPTALK_THREADS").ok()?.parse().ok()?;
    if n == 0 {
        return None;
    }
    #[cfg(feature = "parallel")]
    {
        // Ignore the error when a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Some(n)
}

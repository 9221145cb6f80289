//! Sample-level parallelism helpers.
//!
//! Monte Carlo drivers express their inner loops as `index -> sample` maps so
//! results are independent of scheduling: every sample derives its RNG stream
//! from the master seed and its own index. With the `parallel` feature
//! (default) the maps run on the rayon pool; without it they run sequentially
//! and produce byte-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is enabled.
pub fn map_samples<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n as u64).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n as u64).map(f).collect()
    }
}

/// Sequential reference implementation of [`map_samples`], always available.
/// Benchmarks compare the two; tests assert they agree element-wise.
pub fn map_samples_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..n as u64).map(f).collect()
}

/// Caps the global thread pool. A no-op without the `parallel` feature or if
/// the pool was already initialized.
pub fn configure_threads(n: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
    }
}

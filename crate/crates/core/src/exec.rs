//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the maps below run on the current rayon pool
//! (so `ThreadPool::install` controls the worker count). Output order always
//! matches input order, and each element is computed independently, which is
//! what makes results independent of the schedule.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f(i)` for `i in 0..n` and collects the results in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Maps a slice in order.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Number of workers the helpers above will use.
pub fn current_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

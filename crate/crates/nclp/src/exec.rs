//! Trial fan-out: data-parallel on rayon when the `parallel` feature is
//! enabled, plain sequential otherwise. Results come back in index order in
//! both modes, so any deterministic reduction over the returned vector is
//! bit-identical across modes.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over trial indices `0..n`, in parallel when available.
pub fn map_trials<T, F>(n: usize, f: F) -> Vec<T>
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

/// Sequential reference path, kept unconditionally for benchmarks comparing
/// the two execution modes.
pub fn map_trials_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

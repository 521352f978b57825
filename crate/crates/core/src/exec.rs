//! Parallel-or-sequential execution facade.
//!
//! With the `parallel` feature (default), batch maps fan out over rayon;
//! without it they run sequentially. The explicit `*_seq` variants are kept
//! unconditionally so benchmarks can compare both paths in one binary.

/// Map a function over indexed jobs, parallel when the feature allows.
#[cfg(feature = "parallel")]
pub fn map_jobs<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_jobs<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_jobs_seq(n, f)
}

/// Always-sequential variant.
pub fn map_jobs_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Run two closures, concurrently when the feature allows.
#[cfg(feature = "parallel")]
pub fn join<A, B, FA, FB>(fa: FA, fb: FB) -> (A, B)
where
    A: Send,
    B: Send,
    FA: FnOnce() -> A + Send,
    FB: FnOnce() -> B + Send,
{
    rayon::join(fa, fb)
}

#[cfg(not(feature = "parallel"))]
pub fn join<A, B, FA, FB>(fa: FA, fb: FB) -> (A, B)
where
    FA: FnOnce() -> A,
    FB: FnOnce() -> B,
{
    (fa(), fb())
}

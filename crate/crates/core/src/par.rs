//! Data-parallel helpers with a sequential fallback.
//!
//! Compiled with the `parallel` feature (default), [`map_indexed`] fans out
//! over rayon's global pool; without it, the same call runs sequentially.
//! Callers are responsible for making per-index work independent (e.g. one
//! seeded RNG stream per index), so results never depend on scheduling.

/// True when this build dispatches to rayon.
#[cfg(feature = "parallel")]
pub fn is_parallel() -> bool {
    true
}

/// True when this build dispatches to rayon.
#[cfg(not(feature = "parallel"))]
pub fn is_parallel() -> bool {
    false
}

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    map_indexed_seq(n, f)
}

/// Sequential variant, always available (benchmark baseline).
pub fn map_indexed_seq<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Rayon variant, only with the `parallel` feature (benchmark subject).
#[cfg(feature = "parallel")]
pub fn map_indexed_par<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

//! Execution policy for data-parallel loops.
//!
//! All parallel entry points in the crate take a [`Workers`] value and call
//! [`map_indexed`]. Outputs are always returned in index order and every
//! reduction downstream runs serially over that ordered vector, which keeps
//! floating-point results bit-identical across worker counts.

use std::env;

/// Environment variable consulted by [`Workers::from_env`].
pub const WORKERS_ENV: &str = "OCTANE_WORKERS";

/// Number of worker threads to use for a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Workers(usize);

impl Workers {
    pub fn new(count: usize) -> Self {
        Workers(count.max(1))
    }

    pub fn serial() -> Self {
        Workers(1)
    }

    /// One worker per available CPU.
    pub fn available() -> Self {
        Workers::new(
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
        )
    }

    /// Reads `OCTANE_WORKERS`, falling back to [`Workers::available`].
    pub fn from_env() -> Self {
        env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .map(Workers::new)
            .unwrap_or_else(Workers::available)
    }

    pub fn count(self) -> usize {
        self.0
    }
}

impl Default for Workers {
    fn default() -> Self {
        Workers::from_env()
    }
}

/// Evaluates `f(0..n)` and returns the results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(workers: Workers, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;

    if workers.count() <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new()
        .num_threads(workers.count())
        .build()
    {
        Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
        Err(_) => (0..n).map(f).collect(),
    }
}

/// Evaluates `f(0..n)` and returns the results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(_workers: Workers, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let serial = map_indexed(Workers::serial(), 100, |i| i * i);
        let parallel = map_indexed(Workers::new(8), 100, |i| i * i);
        assert_eq!(serial, parallel);
        assert_eq!(serial[7], 49);
    }

    #[test]
    fn zero_workers_clamps_to_one() {
        assert_eq!(Workers::new(0).count(), 1);
    }
}

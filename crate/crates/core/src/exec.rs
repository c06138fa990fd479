//! Block-parallel execution of Monte Carlo work.
//!
//! Path ensembles are cut into fixed-size blocks; block `b` draws from its
//! own [`RngStream`](crate::RngStream) child `b` and results are merged in
//! block order. Output is therefore independent of how many workers ran the
//! blocks or in which order they finished.

use alloc::vec::Vec;

/// Paths simulated per block (and per RNG stream).
pub const PATHS_PER_BLOCK: u64 = 1024;

pub trait Executor: Sync {
    /// Evaluate `f(0), …, f(n_blocks - 1)` and return them in index order.
    fn map_blocks<T, F>(&self, n_blocks: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync;
}

/// Runs every block on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_blocks<T, F>(&self, n_blocks: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync,
    {
        (0..n_blocks).map(f).collect()
    }
}

/// Block `b` of an ensemble of `n_paths`: its path-index range.
pub fn block_range(n_paths: u64, b: u64) -> core::ops::Range<u64> {
    let lo = b * PATHS_PER_BLOCK;
    lo..(lo + PATHS_PER_BLOCK).min(n_paths)
}

pub fn n_blocks(n_paths: u64) -> u64 {
    n_paths.div_ceil(PATHS_PER_BLOCK)
}

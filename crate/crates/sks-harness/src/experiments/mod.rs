//! Experiment drivers. Each submodule owns one verification experiment; the
//! helpers here run per-path work across the thread pool with a fixed
//! reduction order.

pub mod converge;
pub mod energy;
pub mod mass;
pub mod moments;
pub mod stopping;
pub mod twin;

use rayon::prelude::*;
use sks_core::SimError;

/// Runs `work(path_index)` for `n_paths` consecutive indices starting at
/// `path_base`, in parallel, collecting results in index order (so the
/// aggregation that follows is independent of the thread count).
pub(crate) fn run_paths<T: Send>(
    n_paths: usize,
    path_base: u64,
    work: impl Fn(u64) -> Result<T, SimError> + Sync,
) -> Result<Vec<T>, SimError> {
    (0..n_paths as u64)
        .into_par_iter()
        .map(|i| work(path_base + i))
        .collect()
}

/// Index of the last record with `t ≤ horizon` (records are at uniform
/// steps starting from `t = 0`).
pub(crate) fn horizon_index(n_records: usize, dt: f64, horizon: f64) -> usize {
    let idx = (horizon / dt).round() as usize;
    idx.min(n_records.saturating_sub(1))
}

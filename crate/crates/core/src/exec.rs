//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) [`ExecMode::Parallel`] runs on the
//! rayon global pool. Without it, both modes run sequentially and produce
//! identical results.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExecMode {
    #[default]
    Parallel,
    Sequential,
}

impl ExecMode {
    /// Whether work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecMode::Parallel
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(mode: ExecMode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Like [`map`] for fallible work; returns the first error in input order.
pub fn try_map<T, R, E, F>(mode: ExecMode, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map(mode, items, f).into_iter().collect()
}

/// Smallest `k` in `range` for which `f(k)` is `Some`, together with its value.
pub fn find_first<R, F>(mode: ExecMode, range: RangeInclusive<u64>, f: F) -> Option<(u64, R)>
where
    R: Send,
    F: Fn(u64) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return range
            .into_par_iter()
            .find_map_first(|k| f(k).map(|r| (k, r)));
    }
    let _ = mode;
    range.into_iter().find_map(|k| f(k).map(|r| (k, r)))
}

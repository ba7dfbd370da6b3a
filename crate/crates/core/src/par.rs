//! Order-preserving map over an index range, parallel when the `parallel`
//! feature is on. Callers merge the returned chunks deterministically.

use alloc::vec::Vec;

#[cfg(feature = "parallel")]
pub(crate) fn map_indices<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indices<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}

/// Splits `0..total` into at most `parts` contiguous, non-empty ranges.
pub(crate) fn split_range(total: u64, parts: u64) -> Vec<(u64, u64)> {
    let parts = parts.clamp(1, total.max(1));
    let step = total.div_ceil(parts);
    let mut out = Vec::new();
    let mut lo = 0;
    while lo < total {
        let hi = (lo + step).min(total);
        out.push((lo, hi));
        lo = hi;
    }
    out
}

/// Number of chunks to cut parallel work into.
pub(crate) const CHUNKS: u64 = 64;

//! Thin shim over rayon so the rest of the crate does not care whether the
//! `parallel` feature is on. Every helper returns results in input order.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving order.
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
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

/// Maps `f` over an index range, preserving order.
pub fn map_range<U, F>(range: Range<usize>, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        range.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        range.map(f).collect()
    }
}

/// Folds an index range in chunks and merges the per-chunk accumulators in
/// chunk order, so the result does not depend on scheduling.
pub fn fold_chunks<A, F, M>(range: Range<u64>, chunk: u64, init: A, fold: F, merge: M) -> A
where
    A: Clone + Send + Sync,
    F: Fn(A, u64) -> A + Sync + Send,
    M: Fn(A, A) -> A,
{
    let chunk = chunk.max(1);
    let starts: Vec<u64> = (range.start..range.end).step_by(chunk as usize).collect();
    let end = range.end;
    let partials = map(&starts, |&s| {
        let stop = (s + chunk).min(end);
        (s..stop).fold(init.clone(), &fold)
    });
    partials.into_iter().fold(init, merge)
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

//! Deterministic floating-point reductions.
//!
//! Sums are combined in a fixed pairwise tree over a fixed partition of the
//! input, so the result is bitwise identical no matter how many worker
//! threads rayon schedules. Pairwise combination also keeps rounding error
//! at O(log n) instead of O(n).

use rayon::prelude::*;

const LEAF: usize = 64;

/// Pairwise tree sum of a slice. Deterministic for a given input.
pub fn tree_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    tree_sum(&xs[..mid]) + tree_sum(&xs[mid..])
}

/// Evaluate `f` for each index in parallel and tree-sum the results in
/// index order. The partition is by index, not by thread, so the sum is
/// independent of the worker count.
pub fn par_indexed_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let parts: Vec<f64> = (0..n).into_par_iter().map(f).collect();
    tree_sum(&parts)
}

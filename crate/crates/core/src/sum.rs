//! Deterministic balanced-tree summation.
//!
//! Composite estimates and certificates are reductions over per-interval
//! terms. To make outputs reproducible regardless of how the per-interval
//! work was scheduled, every reduction in this crate goes through
//! [`pairwise_sum`], which fixes the association order: the slice is split
//! left-to-right into halves until a small leaf is reached.

const LEAF: usize = 8;

/// Sums a slice in a fixed balanced-tree order.
///
/// The result depends only on the contents and order of `xs`, never on
/// thread scheduling or chunking, and the tree shape keeps the worst-case
/// rounding error at O(log n) rather than O(n).
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

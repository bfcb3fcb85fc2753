//! Data-parallel helpers with a sequential fallback.
//!
//! Every parallel reduction used in the crate is deterministic: work items
//! are computed independently (indexed map) and combined in index order, so
//! results are bit-identical with and without the `parallel` feature.

/// Maps `f` over `0..n` and collects results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T>(n: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Sequential reference implementation, always available; the criterion
/// bench suite compares it against the parallel path.
pub fn map_indexed_seq<T>(n: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Sums `f(i)` over `0..n` deterministically: terms are materialized in
/// index order and folded sequentially, with only the term evaluation
/// parallelized.
pub fn sum_indexed(n: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    map_indexed(n, f).into_iter().sum()
}

pub fn sum_indexed_seq(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    (0..n).map(f).sum()
}

/// Maximum of `f(i)` over `0..n` (order-independent reduction).
#[cfg(feature = "parallel")]
pub fn max_indexed(n: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    use rayon::prelude::*;
    (0..n)
        .into_par_iter()
        .map(f)
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

#[cfg(not(feature = "parallel"))]
pub fn max_indexed(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    (0..n).map(f).fold(f64::NEG_INFINITY, f64::max)
}

pub fn max_indexed_seq(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    (0..n).map(f).fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let f = |i: usize| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
        let a = map_indexed(1000, f);
        let b = map_indexed_seq(1000, f);
        assert_eq!(a, b);
        assert_eq!(sum_indexed(1000, f), sum_indexed_seq(1000, f));
        assert_eq!(max_indexed(1000, f), max_indexed_seq(1000, f));
    }
}

//! Deterministic summation independent of thread count.

use rayon::prelude::*;

const CHUNK: usize = 1024;

/// Pairwise (cascade) summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Sums fixed-size chunks in order, then combines the chunk sums pairwise.
pub fn chunked_sum(v: &[f64]) -> f64 {
    let partial: Vec<f64> = v.par_chunks(CHUNK).map(pairwise_sum).collect();
    pairwise_sum(&partial)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_exact_integer_sum() {
        let v: Vec<f64> = (0..100_000).map(|k| k as f64).collect();
        assert_eq!(chunked_sum(&v), 4_999_950_000.0);
    }
}

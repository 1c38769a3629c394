//! Shared inputs for the criterion benchmarks.

use centered_bound::HalfSinhLength;

/// `n` bounds `1, 2, …, n` in the half-sinh convention.
pub fn ramp(n: usize) -> Vec<HalfSinhLength> {
    (1..=n)
        .map(|i| HalfSinhLength::new(i as f64).unwrap())
        .collect()
}

/// `n` copies of `sinh(ℓ/2) = 1`.
pub fn uniform(n: usize) -> Vec<HalfSinhLength> {
    vec![HalfSinhLength::new(1.0).unwrap(); n]
}

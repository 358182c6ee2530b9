//! Reference values computed without any of the production formulas.

use num_bigint::BigInt;
use num_traits::Pow;

use crate::numeric::Rational;

/// For every sequence in `[m]^n`, tally its number of distinct symbols.
/// `counts[k]` is the number of sequences with exactly `k` distinct values.
pub fn enumerate_distinct_counts(m: u64, n: u64) -> Vec<u64> {
    assert!(m >= 1, "m must be >= 1");
    let total = m.checked_pow(n as u32).expect("m^n fits in u64");
    let mut counts = vec![0u64; m as usize + 1];
    let mut digits = vec![0u64; n as usize];
    let mut seen = vec![false; m as usize];
    for _ in 0..total {
        seen.iter_mut().for_each(|s| *s = false);
        let mut distinct = 0;
        for &d in &digits {
            if !seen[d as usize] {
                seen[d as usize] = true;
                distinct += 1;
            }
        }
        counts[distinct] += 1;
        // odometer increment
        for d in digits.iter_mut() {
            *d += 1;
            if *d < m {
                break;
            }
            *d = 0;
        }
    }
    counts
}

/// Exact `P(X_n = k)` for `k = 0..=m` by enumeration.
pub fn enumerated_pmf(m: u64, n: u64) -> Vec<Rational> {
    let total = BigInt::from(m).pow(n as u32);
    enumerate_distinct_counts(m, n)
        .into_iter()
        .map(|c| Rational::new(BigInt::from(c), total.clone()))
        .collect()
}

/// `m·H_m = Σ_{j=1}^{m} m/j`, the expected completion time.
pub fn expected_completion(m: u64) -> f64 {
    (1..=m).map(|j| m as f64 / j as f64).sum()
}

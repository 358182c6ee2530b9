//! Stirling numbers of the second kind, `a(n, k)`.
//!
//! The table built from `a(n,k) = a(n-1,k-1) + k·a(n-1,k)` is the producer;
//! [`stirling_explicit`] evaluates the alternating sum
//! `(1/k!) Σ_{j=1}^{k} (-1)^{k-j} C(k,j) j^n` and serves as its verifier.
//! Indices are 1-based on the public surface.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};

use crate::numeric::{alternating_sign, binomial, factorial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StirlingTable {
    n_max: u64,
    // rows[n - 1][k - 1] = a(n, k) for 1 <= k <= n
    rows: Vec<Vec<BigInt>>,
}

impl StirlingTable {
    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    /// `a(n, k)`; zero for `k > n` or `k == 0`. Panics if `n` is outside `1..=n_max`.
    pub fn get(&self, n: u64, k: u64) -> BigInt {
        assert!(
            (1..=self.n_max).contains(&n),
            "row {n} outside table 1..={}",
            self.n_max
        );
        if k == 0 || k > n {
            return BigInt::zero();
        }
        self.rows[(n - 1) as usize][(k - 1) as usize].clone()
    }

    /// Row `n` as a slice indexed by `k - 1`.
    pub fn row(&self, n: u64) -> &[BigInt] {
        &self.rows[(n - 1) as usize]
    }

    /// All `(n, k, a)` entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (u64, u64, &BigInt)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(move |(j, a)| (i as u64 + 1, j as u64 + 1, a))
        })
    }
}

pub fn stirling_table(n_max: u64) -> StirlingTable {
    assert!(n_max >= 1, "stirling_table requires n_max >= 1");
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max as usize);
    rows.push(vec![BigInt::one()]);
    for n in 2..=n_max as usize {
        let prev = &rows[n - 2];
        let mut row = Vec::with_capacity(n);
        for k in 1..=n {
            let left = if k >= 2 {
                prev[k - 2].clone()
            } else {
                BigInt::zero()
            };
            let stay = if k < n {
                &prev[k - 1] * k
            } else {
                BigInt::zero()
            };
            row.push(left + stay);
        }
        rows.push(row);
    }
    StirlingTable { n_max, rows }
}

/// Alternating-sum evaluation of `a(n, k)`; zero for `k > n`.
pub fn stirling_explicit(n: u64, k: u64) -> BigInt {
    assert!(n >= 1 && k >= 1, "stirling_explicit requires n, k >= 1");
    let sum = alternating_power_sum(n, k);
    let (q, r) = sum.div_rem(&factorial(k));
    assert!(
        r.is_zero(),
        "alternating sum for a({n},{k}) not divisible by {k}!"
    );
    q
}

/// `Σ_{j=1}^{k} (-1)^{k-j} C(k,j) j^n`, which equals `k!·a(n,k)`.
pub fn alternating_power_sum(n: u64, k: u64) -> BigInt {
    let mut sum = BigInt::zero();
    for j in 1..=k {
        let term = binomial(k, j as i64) * BigInt::from(j).pow(n as u32);
        if alternating_sign(k - j) > 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

//! The law of `X_n`, the number of distinct coupons after `n` uniform draws
//! with replacement from `m` types.
//!
//! Three exact routes produce `p(n, k) = P(X_n = k)`:
//!
//! - [`dp_pmf`]: the master equation
//!   `p(n,k) = p(n-1,k-1)·(m-k+1)/m + p(n-1,k)·k/m` from `p(0,0) = 1`;
//! - [`closed_form_pmf_rude`]: `m^{-(n-k)} · ∏_{h<k}(1 - h/m) · a(n,k)`;
//! - [`closed_form_pmf`]: `C(m,k)/m^n · Σ_{j=1}^{k} (-1)^{k-j} C(k,j) j^n`.
//!
//! The closed forms are stated for `1 <= k <= m` and `n >= 1`. Everywhere else
//! the boundary convention applies: `p(0,0) = 1`, `p(0,k) = 0` for `k >= 1`,
//! and `p(n,0) = 0` for `n >= 1`.
//!
//! The float backend used for production numbers is the master equation
//! ([`float_pmf`]); every update adds nonnegative terms. [`float_closed_form`]
//! evaluates the alternating sum naively and reports how badly it behaves.

use num_bigint::BigInt;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{
    alternating_sign, big_ratio_to_f64, binomial, falling_product, int, pow_rational, ratio,
    Rational,
};
use crate::stirling::{alternating_power_sum, stirling_explicit};

/// Exact `p(n, k)` for `0 <= n <= n_max`, `0 <= k <= m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistTable {
    m: u64,
    n_max: u64,
    rows: Vec<Vec<Rational>>,
}

impl DistTable {
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn row(&self, n: u64) -> &[Rational] {
        &self.rows[n as usize]
    }

    pub fn get(&self, n: u64, k: u64) -> &Rational {
        &self.rows[n as usize][k as usize]
    }

    pub fn rows(&self) -> impl Iterator<Item = (u64, &[Rational])> {
        self.rows
            .iter()
            .enumerate()
            .map(|(n, r)| (n as u64, r.as_slice()))
    }
}

/// Float counterpart of [`DistTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct FloatDistTable {
    m: u64,
    n_max: u64,
    rows: Vec<Vec<f64>>,
}

impl FloatDistTable {
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn row(&self, n: u64) -> &[f64] {
        &self.rows[n as usize]
    }

    pub fn get(&self, n: u64, k: u64) -> f64 {
        self.rows[n as usize][k as usize]
    }
}

/// Upper bound on the number of cells an exact table may hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableLimits {
    pub max_cells: u128,
}

impl Default for TableLimits {
    fn default() -> Self {
        TableLimits {
            max_cells: 10_000_000,
        }
    }
}

impl TableLimits {
    fn check(&self, m: u64, n_max: u64) -> Result<()> {
        let cells = (m as u128 + 1) * (n_max as u128 + 1);
        if cells > self.max_cells {
            return Err(Error::TableTooLarge {
                cells,
                cap: self.max_cells,
            });
        }
        Ok(())
    }
}

/// Streams exact master-equation rows `n = 0, 1, 2, ...` holding only the
/// current row.
#[derive(Debug, Clone)]
pub struct MasterEquation {
    m: u64,
    n: u64,
    row: Vec<Rational>,
}

impl MasterEquation {
    pub fn new(m: u64) -> Self {
        assert!(m >= 1, "coupon count m must be >= 1");
        let mut row = vec![Rational::zero(); m as usize + 1];
        row[0] = Rational::one();
        MasterEquation { m, n: 0, row }
    }

    /// Current step and row.
    pub fn current(&self) -> (u64, &[Rational]) {
        (self.n, &self.row)
    }

    /// Advances one draw.
    pub fn step(&mut self) {
        let m = self.m;
        let md = int(m);
        // descending k so row[k - 1] still holds the previous step
        for k in (0..=m as usize).rev() {
            let stay = &self.row[k] * ratio(k as u64, m);
            let arrive = if k >= 1 {
                &self.row[k - 1] * int(m - k as u64 + 1) / &md
            } else {
                Rational::zero()
            };
            self.row[k] = stay + arrive;
        }
        self.n += 1;
    }

    /// Advances to step `n` (never backwards) and returns that row.
    pub fn advance_to(&mut self, n: u64) -> &[Rational] {
        assert!(n >= self.n, "cannot rewind from step {} to {n}", self.n);
        while self.n < n {
            self.step();
        }
        &self.row
    }
}

/// The master equation scaled by `m^n`: `counts[k]` is the number of draw
/// sequences in `[m]^n` with exactly `k` distinct coupons. Integer-only, so
/// it reaches horizons where reduced rationals become expensive.
#[derive(Debug, Clone)]
pub struct CountRows {
    m: u64,
    n: u64,
    counts: Vec<BigInt>,
    total: BigInt,
}

impl CountRows {
    pub fn new(m: u64) -> Self {
        assert!(m >= 1, "coupon count m must be >= 1");
        let mut counts = vec![BigInt::zero(); m as usize + 1];
        counts[0] = BigInt::one();
        CountRows {
            m,
            n: 0,
            counts,
            total: BigInt::one(),
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn counts(&self) -> &[BigInt] {
        &self.counts
    }

    /// `m^n`, the number of draw sequences.
    pub fn total(&self) -> &BigInt {
        &self.total
    }

    pub fn step(&mut self) {
        let m = self.m as usize;
        for k in (1..=m).rev() {
            let arrive = &self.counts[k - 1] * (m - k + 1);
            let stay = &self.counts[k] * k;
            self.counts[k] = arrive + stay;
        }
        self.counts[0] = BigInt::zero();
        self.total *= self.m;
        self.n += 1;
    }

    pub fn probability(&self, k: u64) -> Rational {
        Rational::new(self.counts[k as usize].clone(), self.total.clone())
    }

    /// Correctly rounded `f64` of every entry of the current row.
    pub fn to_f64_row(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|c| big_ratio_to_f64(c, &self.total))
            .collect()
    }
}

/// Exact table by the master equation.
pub fn dp_pmf(m: u64, n_max: u64) -> DistTable {
    build_dp(m, n_max)
}

/// [`dp_pmf`] with an explicit cap on stored cells.
pub fn dp_pmf_limited(m: u64, n_max: u64, limits: &TableLimits) -> Result<DistTable> {
    if m == 0 {
        return Err(Error::Domain("m must be >= 1".into()));
    }
    limits.check(m, n_max)?;
    Ok(build_dp(m, n_max))
}

fn build_dp(m: u64, n_max: u64) -> DistTable {
    let mut chain = MasterEquation::new(m);
    let mut rows = Vec::with_capacity(n_max as usize + 1);
    rows.push(chain.current().1.to_vec());
    for _ in 0..n_max {
        chain.step();
        rows.push(chain.current().1.to_vec());
    }
    DistTable { m, n_max, rows }
}

fn check_closed_form_domain(m: u64, n: u64, k: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain("m must be >= 1".into()));
    }
    if n == 0 {
        return Err(Error::Domain(
            "closed forms are stated for n >= 1; use the boundary row for n = 0".into(),
        ));
    }
    if k == 0 || k > m {
        return Err(Error::Domain(format!(
            "closed forms are stated for k in [1, {m}], got k = {k}"
        )));
    }
    Ok(())
}

/// `C(m,k)/m^n · Σ_{j=1}^{k} (-1)^{k-j} C(k,j) j^n` for `1 <= k <= m`, `n >= 1`.
pub fn closed_form_pmf(m: u64, n: u64, k: u64) -> Result<Rational> {
    check_closed_form_domain(m, n, k)?;
    let num = binomial(m, k as i64) * alternating_power_sum(n, k);
    Ok(Rational::new(num, BigInt::from(m).pow(n as u32)))
}

/// `m^{-(n-k)} · ∏_{h=0}^{k-1}(1 - h/m) · a(n,k)` with `a(n,k)` from the
/// alternating sum, for `1 <= k <= m`, `n >= 1`.
pub fn closed_form_pmf_rude(m: u64, n: u64, k: u64) -> Result<Rational> {
    check_closed_form_domain(m, n, k)?;
    let scale = if n >= k {
        pow_rational(&ratio(1, m), (n - k) as u32)
    } else {
        int(BigInt::from(m).pow((k - n) as u32))
    };
    Ok(scale * falling_product(m, k) * int(stirling_explicit(n, k)))
}

/// Which closed form fills a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    Simplified,
    Rude,
}

/// Full row `k = 0..=m` from a closed form, with the boundary convention
/// outside its stated domain.
pub fn closed_form_row(m: u64, n: u64, form: ClosedForm) -> Vec<Rational> {
    assert!(m >= 1, "coupon count m must be >= 1");
    let mut row = vec![Rational::zero(); m as usize + 1];
    if n == 0 {
        row[0] = Rational::one();
        return row;
    }
    for k in 1..=m {
        let p = match form {
            ClosedForm::Simplified => closed_form_pmf(m, n, k),
            ClosedForm::Rude => closed_form_pmf_rude(m, n, k),
        };
        row[k as usize] = p.expect("k in [1, m] and n >= 1");
    }
    row
}

/// Float master equation.
pub fn float_pmf(m: u64, n_max: u64) -> FloatDistTable {
    let mut chain = FloatChain::new(m);
    let mut rows = Vec::with_capacity(n_max as usize + 1);
    rows.push(chain.row.clone());
    for _ in 0..n_max {
        chain.step();
        rows.push(chain.row.clone());
    }
    FloatDistTable { m, n_max, rows }
}

#[derive(Debug, Clone)]
struct FloatChain {
    m: u64,
    row: Vec<f64>,
}

impl FloatChain {
    fn new(m: u64) -> Self {
        assert!(m >= 1, "coupon count m must be >= 1");
        let mut row = vec![0.0; m as usize + 1];
        row[0] = 1.0;
        FloatChain { m, row }
    }

    fn step(&mut self) {
        let m = self.m as f64;
        for k in (1..self.row.len()).rev() {
            let arrive = self.row[k - 1] * (m - k as f64 + 1.0) / m;
            let stay = self.row[k] * k as f64 / m;
            self.row[k] = arrive + stay;
        }
        self.row[0] = 0.0;
    }
}

/// Naive `f64` evaluation of the simplified closed form, instrumented.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloatClosedForm {
    /// `C(m,k) · S / m^n` computed term by term in `f64`.
    pub value: f64,
    /// `S = Σ_j (-1)^{k-j} C(k,j) j^n` as accumulated in `f64`.
    pub alternating_sum: f64,
    /// Largest `|C(k,j) j^n|`.
    pub max_term: f64,
    pub sum_abs_terms: f64,
    /// `max_term / |S|`; infinite when the evaluation overflowed or `S`
    /// came out zero with nonzero terms.
    pub cancellation_ratio: f64,
    /// Some intermediate (`j^n`, `C(k,j)`, or `m^n`) exceeded the `f64` range.
    pub overflowed: bool,
}

pub fn float_closed_form(m: u64, n: u64, k: u64) -> Result<FloatClosedForm> {
    check_closed_form_domain(m, n, k)?;
    let big_to_f64 = |b: BigInt| b.to_f64().unwrap_or(f64::INFINITY);
    let mut overflowed = false;
    let mut sum = 0.0f64;
    let mut max_term = 0.0f64;
    let mut sum_abs = 0.0f64;
    for j in 1..=k {
        let term = big_to_f64(binomial(k, j as i64)) * (j as f64).powf(n as f64);
        overflowed |= !term.is_finite();
        max_term = max_term.max(term);
        sum_abs += term;
        sum += f64::from(alternating_sign(k - j)) * term;
    }
    let scale = (m as f64).powf(n as f64);
    let lead = big_to_f64(binomial(m, k as i64));
    overflowed |= !scale.is_finite() || !lead.is_finite();
    let value = lead * sum / scale;
    let cancellation_ratio = if overflowed || !sum.is_finite() || sum == 0.0 {
        f64::INFINITY
    } else {
        max_term / sum.abs()
    };
    Ok(FloatClosedForm {
        value,
        alternating_sum: sum,
        max_term,
        sum_abs_terms: sum_abs,
        cancellation_ratio,
        overflowed,
    })
}

/// `E[X_n] = Σ_k k·p(n,k)` from the master equation.
pub fn mean_coupons(m: u64, n: u64) -> Rational {
    let mut chain = MasterEquation::new(m);
    chain
        .advance_to(n)
        .iter()
        .enumerate()
        .map(|(k, p)| p * int(k as u64))
        .fold(Rational::zero(), |acc, x| acc + x)
}

/// `m·(1 - (1 - 1/m)^n)`, the closed form of [`mean_coupons`].
pub fn mean_coupons_closed(m: u64, n: u64) -> Rational {
    assert!(m >= 1, "coupon count m must be >= 1");
    let miss = pow_rational(&(Rational::one() - ratio(1, m)), n as u32);
    int(m) * (Rational::one() - miss)
}

/// Law of the completion time `T = min{n : X_n = m}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletionStats {
    pub m: u64,
    /// `cdf[n] = P(T <= n) = p(n, m)`.
    pub cdf: Vec<f64>,
    /// `pmf[n] = P(T = n)`.
    pub pmf: Vec<f64>,
    /// `E[T]`, within `tail_tol` of the true value.
    pub mean: f64,
}

/// Completion-time law from the float master equation.
///
/// The mean is the survival sum `Σ_{n>=0} (1 - p(n, m))`, stopped at the
/// first `n` with `m·(1 - 1/m)^n < tail_tol / m`. Each survival term is at
/// most `m·(1 - 1/m)^n`, so the dropped tail is below `tail_tol`.
pub fn completion_stats(m: u64, tail_tol: f64) -> CompletionStats {
    assert!(m >= 1, "coupon count m must be >= 1");
    assert!(
        tail_tol > 0.0 && tail_tol < 1.0,
        "tail_tol must lie in (0, 1), got {tail_tol}"
    );
    let mf = m as f64;
    let miss = 1.0 - 1.0 / mf;
    let cutoff = tail_tol / mf;
    let mut chain = FloatChain::new(m);
    let mut cdf = Vec::new();
    let mut pmf = Vec::new();
    let mut mean = 0.0;
    let mut majorant = mf;
    let mut n = 0u64;
    loop {
        let c = chain.row[m as usize];
        pmf.push(c - cdf.last().copied().unwrap_or(0.0));
        cdf.push(c);
        mean += 1.0 - c;
        n += 1;
        majorant *= miss;
        if majorant < cutoff {
            break;
        }
        chain.step();
    }
    debug_assert_eq!(cdf.len() as u64, n);
    CompletionStats { m, cdf, pmf, mean }
}

//! Generating functions of the distinct-coupon count.
//!
//! `g_n(y) = E[y^{X_n}]` is a polynomial whose `y^k` coefficient is
//! `p(n, k)`. It is produced three ways:
//!
//! - iterating the operator `g ↦ y·[g + ((1 - y)/m)·g']` from `g_0 = 1`
//!   ([`apply_recurrence`]);
//! - summing `y^k · m^{-(n-k)} · ∏_{h<k}(1 - h/m) · a(n,k)` ([`gn_direct`]);
//! - reading off the `x^n/n!` coefficient of `[1 - y(1 - e^{x/m})]^m`
//!   expanded as a truncated power series ([`egf_expand`]).

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, ToPrimitive, Zero};

use crate::numeric::{factorial, falling_product, int, pow_rational, ratio, Rational};
use crate::stirling::stirling_explicit;

/// Dense polynomial in `y` with exact coefficients; `coeffs[k]` multiplies `y^k`.
/// Trailing zeros are always trimmed, so the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolyY {
    coeffs: Vec<Rational>,
}

impl PolyY {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        PolyY { coeffs }
    }

    pub fn zero() -> Self {
        PolyY { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        PolyY::new(vec![c])
    }

    pub fn one() -> Self {
        PolyY::constant(Rational::one())
    }

    /// The monomial `y`.
    pub fn y() -> Self {
        PolyY::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `y^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, y: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * y + c)
    }

    pub fn eval_f64(&self, y: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * y + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Formal derivative in `y`.
    pub fn derivative(&self) -> PolyY {
        PolyY::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as u64))
                .collect(),
        )
    }

    /// Multiplication by `y`.
    pub fn shift(&self) -> PolyY {
        if self.is_zero() {
            return PolyY::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        PolyY { coeffs }
    }

    pub fn scale(&self, s: &Rational) -> PolyY {
        PolyY::new(self.coeffs.iter().map(|c| c * s).collect())
    }
}

impl Add for &PolyY {
    type Output = PolyY;

    fn add(self, rhs: &PolyY) -> PolyY {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        PolyY::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &PolyY {
    type Output = PolyY;

    fn sub(self, rhs: &PolyY) -> PolyY {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        PolyY::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &PolyY {
    type Output = PolyY;

    fn mul(self, rhs: &PolyY) -> PolyY {
        if self.is_zero() || rhs.is_zero() {
            return PolyY::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyY::new(out)
    }
}

impl fmt::Display for PolyY {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})y")?,
                _ => write!(f, "({c})y^{k}")?,
            }
        }
        Ok(())
    }
}

/// One step of `g ↦ y·[g + ((1 - y)/m)·g']`.
pub fn apply_recurrence(g: &PolyY, m: u64) -> PolyY {
    assert!(m >= 1, "coupon count m must be >= 1");
    let one_minus_y = PolyY::new(vec![Rational::one(), -Rational::one()]);
    let drift = (&one_minus_y * &g.derivative()).scale(&ratio(1, m));
    (g + &drift).shift()
}

/// `g_n` by `n` applications of [`apply_recurrence`] to `g_0 = 1`.
pub fn gn_iterated(m: u64, n: u64) -> PolyY {
    (0..n).fold(PolyY::one(), |g, _| apply_recurrence(&g, m))
}

/// `g_n` from the product form with Stirling coefficients.
///
/// Terms with `k > m` carry the vanishing factor `(1 - m/m)`, so the sum is
/// taken to `min(n, m)`.
pub fn gn_direct(m: u64, n: u64) -> PolyY {
    assert!(m >= 1, "coupon count m must be >= 1");
    if n == 0 {
        return PolyY::one();
    }
    debug_assert!((m + 1..=n).all(|k| falling_product(m, k).is_zero()));
    let top = n.min(m);
    let mut coeffs = vec![Rational::zero(); top as usize + 1];
    for k in 1..=top {
        let weight = pow_rational(&ratio(1, m), (n - k) as u32) * falling_product(m, k);
        coeffs[k as usize] = weight * int(stirling_explicit(n, k));
    }
    PolyY::new(coeffs)
}

/// Truncated expansion of `G_m(x, y) = Σ_n x^n/n! · g_n(y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgfSeries {
    m: u64,
    order: u64,
    terms: Vec<PolyY>,
}

impl EgfSeries {
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Coefficient of `x^n/n!`; `None` past the truncation order.
    pub fn term(&self, n: u64) -> Option<&PolyY> {
        self.terms.get(n as usize)
    }

    pub fn terms(&self) -> &[PolyY] {
        &self.terms
    }

    /// `Σ_{n <= order} x^n/n! · g_n(y)` in `f64`.
    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        let mut weight = 1.0;
        let mut acc = 0.0;
        for (n, g) in self.terms.iter().enumerate() {
            if n > 0 {
                weight *= x / n as f64;
            }
            acc += weight * g.eval_f64(y);
        }
        acc
    }
}

/// Power series in `x` (ordinary coefficients) with polynomial-in-`y`
/// coefficients, truncated after `x^order`.
#[derive(Debug, Clone)]
struct XSeries {
    coeffs: Vec<PolyY>,
}

impl XSeries {
    fn one(order: usize) -> Self {
        let mut coeffs = vec![PolyY::zero(); order + 1];
        coeffs[0] = PolyY::one();
        XSeries { coeffs }
    }

    fn mul_truncated(&self, rhs: &XSeries) -> XSeries {
        let len = self.coeffs.len();
        let mut out = vec![PolyY::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        XSeries { coeffs: out }
    }

    fn pow_truncated(&self, mut e: u64) -> XSeries {
        let mut base = self.clone();
        let mut acc = XSeries::one(self.coeffs.len() - 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_truncated(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_truncated(&base);
            }
        }
        acc
    }
}

/// Expands `[1 - y(1 - e^{x/m})]^m` through `x^order` with exact coefficients.
pub fn egf_expand(m: u64, order: u64) -> EgfSeries {
    assert!(m >= 1, "coupon count m must be >= 1");
    let len = order as usize + 1;
    // 1 - y(1 - e^{x/m}) = 1 + y·Σ_{n>=1} x^n / (m^n n!)
    let mut bracket = XSeries::one(order as usize);
    for n in 1..len {
        let c = Rational::new(
            One::one(),
            num_bigint::BigInt::from(m).pow(n as u32) * factorial(n as u64),
        );
        bracket.coeffs[n] = PolyY::new(vec![Rational::zero(), c]);
    }
    let power = bracket.pow_truncated(m);
    let terms = power
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| c.scale(&int(factorial(n as u64))))
        .collect();
    EgfSeries { m, order, terms }
}

/// `[1 - y(1 - e^{x/m})]^m` in `f64`.
pub fn egf_closed_eval(m: u64, x: f64, y: f64) -> f64 {
    assert!(m >= 1, "coupon count m must be >= 1");
    let bracket = 1.0 + y * (x / m as f64).exp_m1();
    match i32::try_from(m) {
        Ok(e) => bracket.powi(e),
        Err(_) => bracket.powf(m as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(coeffs: &[(i64, i64)]) -> PolyY {
        PolyY::new(coeffs.iter().map(|&(n, d)| ratio(n, d)).collect())
    }

    #[test]
    fn trimming_and_degree() {
        let p = poly(&[(1, 1), (0, 1), (0, 1)]);
        assert_eq!(p.degree(), Some(0));
        assert_eq!(PolyY::new(vec![Rational::zero()]).degree(), None);
        assert_eq!((&p - &p), PolyY::zero());
    }

    #[test]
    fn derivative_is_formal() {
        let p = poly(&[(5, 1), (1, 2), (0, 1), (2, 3)]);
        assert_eq!(p.derivative(), poly(&[(1, 2), (0, 1), (2, 1)]));
        assert_eq!(PolyY::one().derivative(), PolyY::zero());
    }

    #[test]
    fn recurrence_examples() {
        for m in 1..=5 {
            assert_eq!(apply_recurrence(&PolyY::one(), m), PolyY::y());
        }
        assert_eq!(
            apply_recurrence(&PolyY::y(), 2),
            poly(&[(0, 1), (1, 2), (1, 2)])
        );
    }

    #[test]
    fn direct_examples() {
        assert_eq!(gn_direct(2, 2), poly(&[(0, 1), (1, 2), (1, 2)]));
        for m in 1..=5 {
            assert_eq!(gn_direct(m, 0), PolyY::one());
        }
        assert_eq!(gn_direct(3, 3), poly(&[(0, 1), (1, 9), (2, 3), (2, 9)]));
    }

    #[test]
    fn egf_examples() {
        let s = egf_expand(1, 3);
        for n in 1..=3 {
            assert_eq!(s.term(n), Some(&PolyY::y()));
        }
        assert_eq!(s.term(4), None);
        for m in 1..=4 {
            assert_eq!(egf_expand(m, 0).term(0), Some(&PolyY::one()));
        }
        assert_eq!(
            egf_expand(2, 2).term(2),
            Some(&poly(&[(0, 1), (1, 2), (1, 2)]))
        );
    }

    #[test]
    fn closed_eval_examples() {
        for m in 1..=5 {
            for y in [-1.0, 0.0, 0.3, 2.5] {
                assert_eq!(egf_closed_eval(m, 0.0, y), 1.0);
            }
        }
        let expect = 1.0 + 0.5 * (std::f64::consts::E - 1.0);
        assert!((egf_closed_eval(1, 1.0, 0.5) - expect).abs() < 1e-15);
        assert!((expect - 1.859140914).abs() < 1e-9);
        assert!((egf_closed_eval(3, 2.0, 1.0) - 2.0f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn closed_eval_at_y_one_is_exp() {
        for m in 1..=20 {
            for x in [-3.0, -0.5, 0.1, 1.0, 4.0] {
                let e = f64::exp(x);
                let got = egf_closed_eval(m, x, 1.0);
                assert!(((got - e) / e).abs() <= 4.0 * m as f64 * f64::EPSILON);
            }
        }
    }

    #[test]
    fn display_lists_nonzero_terms() {
        assert_eq!(gn_direct(2, 2).to_string(), "(1/2)y + (1/2)y^2");
        assert_eq!(PolyY::zero().to_string(), "0");
    }

    proptest! {
        #[test]
        fn recurrence_preserves_value_at_one(
            raw in proptest::collection::vec(-50i64..50, 0..8),
            m in 1u64..10,
        ) {
            let g = PolyY::new(raw.iter().map(|&c| int(c)).collect());
            let next = apply_recurrence(&g, m);
            prop_assert_eq!(next.eval(&Rational::one()), g.eval(&Rational::one()));
            let deg = g.degree().unwrap_or(0) as u64;
            if let Some(d) = next.degree() {
                prop_assert!(d as u64 <= deg + 1);
            }
        }
    }
}

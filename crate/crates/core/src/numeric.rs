//! Exact integer and rational scalars shared by every other module.
//!
//! [`Rational`] is `num_rational::BigRational`: it is reduced eagerly on
//! construction and after every arithmetic operation, so equality is
//! structural. Its `Display` form is `num/den`, or just `num` when the
//! denominator is one, which is also the serialized form used by the CLI.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Pow, ToPrimitive, Zero};

/// Exact arbitrary-precision fraction.
pub type Rational = num_rational::BigRational;

/// Integer-valued rational.
pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// `num / den`, reduced. Panics when `den` is zero.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Binomial coefficient `C(n, k)`, zero outside `0 <= k <= n`.
///
/// Multiplicative accumulation; every intermediate quotient is exact.
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// `∏_{h=0}^{k-1} (1 - h/m)`.
///
/// Vanishes for `k > m` because the `h = m` factor is zero.
pub fn falling_product(m: u64, k: u64) -> Rational {
    assert!(m >= 1, "falling_product requires m >= 1");
    if k > m {
        return Rational::zero();
    }
    let mut num = BigInt::one();
    for h in 0..k {
        num *= m - h;
    }
    Rational::new(num, BigInt::from(m).pow(k as u32))
}

/// `base^e`, with `base^0 = 1` (including `0^0`).
pub fn pow_rational(base: &Rational, e: u32) -> Rational {
    if e == 0 {
        return Rational::one();
    }
    // Numerator and denominator stay coprime under powers, so no reduction is needed.
    Ratio::new_raw(base.numer().pow(e), base.denom().pow(e))
}

/// `(-1)^e` as a small integer.
pub(crate) fn alternating_sign(e: u64) -> i32 {
    if e.is_even() {
        1
    } else {
        -1
    }
}

/// Nearest `f64` to `num / den`, correctly rounded even when both operands
/// are far outside the `f64` range. `den` must be nonzero.
pub fn big_ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    assert!(!den.is_zero(), "division by zero");
    Ratio::new_raw(num.clone(), den.clone())
        .to_f64()
        .expect("finite ratio converts to f64")
}

pub fn to_f64(x: &Rational) -> f64 {
    big_ratio_to_f64(x.numer(), x.denom())
}

/// Parses the `num/den` or `num` form produced by `Display`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// True when `x` is an integer-valued rational.
pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

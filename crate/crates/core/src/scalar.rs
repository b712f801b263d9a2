//! Coefficient traits and exact rational helpers.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Ring of coefficients. Blanket-implemented for anything with the usual operators.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Multiply by a small integer.
    fn scale_int(&self, k: i64) -> Self {
        let mut acc = Self::zero();
        let mut unit = Self::one();
        if k < 0 {
            unit = -unit;
        }
        for _ in 0..k.unsigned_abs() {
            acc = acc + unit.clone();
        }
        acc * self.clone()
    }
}

impl<T> Coeff for T where
    T: Clone
        + PartialEq
        + Debug
        + Display
        + Send
        + Sync
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// Coefficients that admit exact division; needed for elimination.
pub trait FieldCoeff: Coeff + Div<Output = Self> {}

impl<T> FieldCoeff for T where T: Coeff + Div<Output = T> {}

/// Exact rational from an integer.
pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact rational `n/d`, reduced.
pub fn q_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `p`, `-p` or `p/q` into a canonical rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(BigInt::from_str(t).map_err(|_| bad())?)),
    }
}

/// n! as a rational.
pub fn factorial(n: u32) -> BigRational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    BigRational::from_integer(acc)
}

/// Render a coefficient for use as a multiplier: returns (is_negative, magnitude text).
pub(crate) fn split_sign<F: Display>(c: &F) -> (bool, String) {
    let s = c.to_string();
    match s.strip_prefix('-') {
        // only a single-term value gives its sign to the surrounding sum
        Some(rest) if !needs_parens(rest) => (true, rest.to_string()),
        _ => (false, s),
    }
}

/// True when the rendered magnitude needs parentheses to act as a factor.
pub(crate) fn needs_parens(s: &str) -> bool {
    s.contains(' ')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_canonical() {
        let r = parse_rational("6/-4").unwrap();
        assert_eq!(r, q_frac(-3, 2));
        assert_eq!(r.to_string(), "-3/2");
        assert!(r.denom() > &BigInt::zero());
        assert_eq!(parse_rational(" 7 ").unwrap(), q(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn scale_int_matches_multiplication() {
        assert_eq!(q_frac(1, 3).scale_int(-6), q(-2));
        assert_eq!(q(5).scale_int(0), q(0));
        assert_eq!(2.5f64.scale_int(3), 7.5);
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), q(1));
        assert_eq!(factorial(5), q(120));
    }
}

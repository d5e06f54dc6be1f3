//! Exact scalars and exact linear algebra.
//!
//! Three scalar kinds are used throughout the crate: arbitrary precision
//! rationals ([`Q`]), univariate polynomials over the rationals in a formal
//! parameter `t` ([`Poly`]) and their fraction field ([`RatFunc`]). Generic
//! code is written against the [`Ring`] and [`Field`] traits so the same module
//! machinery runs with numeric or symbolic weights.

mod matrix;
mod poly;
mod ratfunc;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use matrix::{ExactMatrix, Rref};
pub use poly::Poly;
pub use ratfunc::RatFunc;

/// Exact rational number, always in lowest terms with positive denominator.
pub type Q = BigRational;

/// Commutative ring with identity, as needed by the rewriting and Gram code.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(q: &Q) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self / rhs` when the quotient exists in the ring.
    fn try_div(&self, rhs: &Self) -> Option<Self>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn from_int(n: i64) -> Self {
        Self::from_rational(&int(n))
    }

    fn add_assign(&mut self, rhs: &Self) {
        *self = Ring::add(self, rhs);
    }

    /// `self += a * b`
    fn add_mul(&mut self, a: &Self, b: &Self) {
        if !a.is_zero() && !b.is_zero() {
            *self = Ring::add(self, &Ring::mul(a, b));
        }
    }
}

/// A [`Ring`] in which every nonzero element is invertible.
pub trait Field: Ring {
    fn inv(&self) -> Self;

    fn div(&self, rhs: &Self) -> Self {
        Ring::mul(self, &rhs.inv())
    }
}

/// Integral domain with exact division, used by fraction-free elimination.
pub trait ExactDiv: Ring {
    /// Divides `self` by `rhs`, where `rhs` is known to divide `self`.
    fn exact_div(&self, rhs: &Self) -> Self;
}

/// Scalars that can be specialised at a rational value of `t`.
pub trait Evaluate {
    /// `None` when `value` is a pole.
    fn evaluate_at(&self, value: &Q) -> Option<Q>;
}

impl Ring for Q {
    fn zero() -> Self {
        <Q as Zero>::zero()
    }
    fn one() -> Self {
        <Q as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_rational(q: &Q) -> Self {
        q.clone()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn try_div(&self, rhs: &Self) -> Option<Self> {
        (!Zero::is_zero(rhs)).then(|| self / rhs)
    }
    fn add_assign(&mut self, rhs: &Self) {
        *self += rhs;
    }
}

impl Field for Q {
    fn inv(&self) -> Self {
        self.recip()
    }
}

impl Evaluate for Q {
    fn evaluate_at(&self, _value: &Q) -> Option<Q> {
        Some(self.clone())
    }
}

impl Ring for BigInt {
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn one() -> Self {
        <BigInt as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    /// Panics unless `q` is an integer.
    fn from_rational(q: &Q) -> Self {
        assert!(q.is_integer(), "{q} is not an integer");
        q.to_integer()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn try_div(&self, rhs: &Self) -> Option<Self> {
        use num_integer::Integer;
        if Zero::is_zero(rhs) {
            return None;
        }
        let (q, r) = self.div_rem(rhs);
        Zero::is_zero(&r).then_some(q)
    }
}

impl ExactDiv for BigInt {
    fn exact_div(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

/// The integer `n` as a rational.
pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// The rational `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`. Decimal and exponent notation are rejected.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("expected a rational \"p/q\", got {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let valid = |t: &str| {
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) {
        return Err(bad());
    }
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if Zero::is_zero(&d) {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Q::new(n, d))
}

/// Canonical `"p/q"` form, with `q > 0` and `gcd(p, q) = 1`, also for integers.
pub fn fmt_q(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Whether `q` is an integer.
pub fn is_integer(q: &Q) -> bool {
    q.is_integer()
}

/// `q` as an `i64` when it is an integer in range.
pub fn to_i64(q: &Q) -> Option<i64> {
    if !q.is_integer() {
        return None;
    }
    i64::try_from(q.to_integer()).ok()
}

/// Absolute value.
pub fn abs(q: &Q) -> Q {
    q.abs()
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_q {
    use super::{fmt_q, parse_q, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_q("-4").unwrap(), int(-4));
        assert_eq!(parse_q(" 2/-4 ").unwrap(), rat(-1, 2));
        assert_eq!(fmt_q(&rat(2, -4)), "-1/2");
        assert_eq!(fmt_q(&int(3)), "3/1");
        assert!(parse_q("0.5").is_err());
        assert!(parse_q("1e3").is_err());
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("").is_err());
    }
}

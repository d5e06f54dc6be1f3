use std::fmt;

use super::{Evaluate, Field, Poly, Ring, Q};

/// Element of the rational function field `Q(t)`.
///
/// Numerator and denominator are coprime and the denominator is monic; zero is
/// stored as `0 / 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Panics if `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!Ring::is_zero(&den), "rational function with zero denominator");
        if Ring::is_zero(&num) {
            return RatFunc { num, den: Poly::one() };
        }
        let g = num.gcd(&den);
        let (num, den) = (num.div_rem(&g).0, den.div_rem(&g).0);
        let lead = den.leading().expect("nonzero").clone();
        let inv = lead.recip();
        RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl Ring for RatFunc {
    fn zero() -> Self {
        RatFunc::from_poly(Poly::zero())
    }
    fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }
    fn is_zero(&self) -> bool {
        Ring::is_zero(&self.num)
    }
    fn from_rational(q: &Q) -> Self {
        RatFunc::from_poly(Poly::constant(q.clone()))
    }
    fn add(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            return RatFunc::new(self.num.add(&rhs.num), self.den.clone());
        }
        RatFunc::new(self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)), self.den.mul(&rhs.den))
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        RatFunc::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
    fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
    fn try_div(&self, rhs: &Self) -> Option<Self> {
        (!Ring::is_zero(rhs)).then(|| Ring::mul(self, &rhs.inv()))
    }
}

impl Field for RatFunc {
    /// Panics on zero.
    fn inv(&self) -> Self {
        RatFunc::new(self.den.clone(), self.num.clone())
    }
}

impl Evaluate for RatFunc {
    fn evaluate_at(&self, value: &Q) -> Option<Q> {
        let d = self.den.eval(value);
        if Ring::is_zero(&d) {
            return None;
        }
        Some(self.num.eval(value) / d)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

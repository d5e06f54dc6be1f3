use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::{fmt_q, int, Evaluate, ExactDiv, Ring, Q};

/// Polynomial over the rationals in the formal parameter `t`.
///
/// Coefficients are stored lowest degree first with no trailing zeros, so the
/// zero polynomial has an empty coefficient vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Ring::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: Q) -> Self {
        Poly::new(vec![c])
    }

    /// The indeterminate `t`.
    pub fn var() -> Self {
        Poly::new(vec![int(0), int(1)])
    }

    /// `t + c`
    pub fn var_plus(c: &Q) -> Self {
        Poly::new(vec![c.clone(), int(1)])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Q> {
        self.coeffs.last()
    }

    pub fn coeff(&self, d: usize) -> Q {
        self.coeffs.get(d).cloned().unwrap_or_else(|| int(0))
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = int(0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if Ring::is_zero(c) {
            return Poly::default();
        }
        Poly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Scaled to leading coefficient 1; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Poly::default(),
        }
    }

    /// Euclidean division. Panics on division by zero.
    pub fn div_rem(&self, rhs: &Poly) -> (Poly, Poly) {
        let dr = rhs.degree().expect("polynomial division by zero");
        let lead_inv = rhs.coeffs[dr].recip();
        let mut rem = self.coeffs.clone();
        let Some(ds) = self.degree() else {
            return (Poly::default(), Poly::default());
        };
        if ds < dr {
            return (Poly::default(), self.clone());
        }
        let mut quot = vec![int(0); ds - dr + 1];
        for k in (0..=ds - dr).rev() {
            let c = &rem[k + dr] * &lead_inv;
            if Ring::is_zero(&c) {
                continue;
            }
            for (d, b) in rhs.coeffs.iter().enumerate() {
                rem[k + d] -= &c * b;
            }
            quot[k] = c;
        }
        rem.truncate(dr);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, rhs: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), rhs.clone());
        while !b.coeffs.is_empty() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl Ring for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn one() -> Self {
        Poly::constant(int(1))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn from_rational(q: &Q) -> Self {
        Poly::constant(q.clone())
    }
    fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|d| self.coeff(d) + rhs.coeff(d)).collect())
    }
    fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|d| self.coeff(d) - rhs.coeff(d)).collect())
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::default();
        }
        let mut out = vec![int(0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if Ring::is_zero(a) {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
    fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
    fn try_div(&self, rhs: &Self) -> Option<Self> {
        if Ring::is_zero(rhs) {
            return None;
        }
        let (q, r) = self.div_rem(rhs);
        Ring::is_zero(&r).then_some(q)
    }
}

impl ExactDiv for Poly {
    fn exact_div(&self, rhs: &Self) -> Self {
        let (q, r) = self.div_rem(rhs);
        debug_assert!(Ring::is_zero(&r), "inexact polynomial division");
        q
    }
}

impl Evaluate for Poly {
    fn evaluate_at(&self, value: &Q) -> Option<Q> {
        Some(self.eval(value))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if Ring::is_zero(c) {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = Ring::is_one(&mag);
            match d {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !unit {
                        write!(f, "{mag}*")?;
                    }
                    if d == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{d}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Serialises as the coefficient array, lowest degree first, of `"p/q"` strings.
impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(fmt_q).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        let coeffs = v.iter().map(|s| super::parse_q(s)).collect::<crate::error::Result<Vec<_>>>().map_err(serde::de::Error::custom)?;
        Ok(Poly::new(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    fn p(cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn trims_trailing_zeros() {
        assert_eq!(p(&[1, 0, 0]).degree(), Some(0));
        assert!(Ring::is_zero(&p(&[0, 0])));
    }

    #[test]
    fn division_and_gcd() {
        // (t^2 - 1) = (t - 1)(t + 1)
        let a = p(&[-1, 0, 1]);
        let b = p(&[1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, p(&[-1, 1]));
        assert!(Ring::is_zero(&r));
        let g = p(&[-2, 0, 2]).gcd(&p(&[-3, 3]));
        assert_eq!(g, p(&[-1, 1]));
    }

    #[test]
    fn eval_and_display() {
        let a = p(&[0, -1, 1]);
        assert_eq!(a.eval(&int(0)), int(0));
        assert_eq!(a.eval(&rat(1, 2)), rat(-1, 4));
        assert_eq!(a.to_string(), "t^2 - t");
        assert_eq!(Poly::var_plus(&rat(-1, 3)).to_string(), "t - 1/3");
    }

    #[test]
    fn serde_is_coefficient_array() {
        let a = Poly::new(vec![rat(1, 2), int(0), int(-3)]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"["1/2","0/1","-3/1"]"#);
        assert_eq!(serde_json::from_str::<Poly>(&s).unwrap(), a);
    }
}

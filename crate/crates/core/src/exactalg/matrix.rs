use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Serialize, Serializer};

use super::{fmt_q, Evaluate, ExactDiv, Field, Poly, RatFunc, Ring, Q};
use crate::error::{Error, Result};

/// Dense row-major matrix over one scalar kind.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExactMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Reduced row echelon data of a matrix.
#[derive(Clone, Debug)]
pub struct Rref<T> {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub echelon: ExactMatrix<T>,
    /// Right kernel basis stored as columns (`cols x (cols - rank)`).
    pub kernel_basis: ExactMatrix<T>,
}

impl<T: Ring> ExactMatrix<T> {
    /// Panics if `data.len() != rows * cols`.
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        ExactMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for d in 0..n {
            m.set(d, d, T::one());
        }
        m
    }

    /// Panics on ragged input. An empty list gives a `0 x 0` matrix.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ExactMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        ExactMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> ExactMatrix<U> {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Panics on a dimension mismatch.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    out.data[r * rhs.cols + c].add_mul(a, rhs.get(k, c));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows)
            .map(|r| {
                let mut acc = T::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    acc.add_mul(a, b);
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ring::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|r| (r + 1..self.cols).all(|c| self.get(r, c) == self.get(c, r)))
    }

    /// Whether every entry strictly below the diagonal vanishes.
    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|r| (0..r.min(self.cols)).all(|c| self.get(r, c).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|d| self.get(d, d).clone()).collect()
    }

    /// Sub-matrix with the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                data.push(self.get(r, c).clone());
            }
        }
        ExactMatrix { rows: rows.len(), cols: cols.len(), data }
    }

    /// Rows of `self` followed by rows of `other`. Panics on a column mismatch.
    pub fn stack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "column mismatch in stack");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        ExactMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }
}

impl<T: Field> ExactMatrix<T> {
    /// Reduced row echelon form. The pivot of each step is the first nonzero
    /// entry of the leftmost column that still has one.
    pub fn rref(&self) -> Rref<T> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&p| !m.get(p, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv();
            for cc in c..m.cols {
                let v = m.get(r, cc).mul(&inv);
                m.set(r, cc, v);
            }
            for rr in 0..m.rows {
                if rr == r {
                    continue;
                }
                let factor = m.get(rr, c).clone();
                if factor.is_zero() {
                    continue;
                }
                for cc in c..m.cols {
                    let v = m.get(rr, cc).sub(&factor.mul(m.get(r, cc)));
                    m.set(rr, cc, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        let rank = pivots.len();
        let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
        let mut kernel = ExactMatrix::zeros(m.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            kernel.set(f, k, T::one());
            for (pr, &pc) in pivots.iter().enumerate() {
                kernel.set(pc, k, m.get(pr, f).neg());
            }
        }
        Rref { rank, pivots, echelon: m, kernel_basis: kernel }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }
}

impl<T: ExactDiv> ExactMatrix<T> {
    /// Rank by fraction-free (Bareiss) elimination.
    pub fn rank_fraction_free(&self) -> usize {
        let mut m = self.clone();
        let mut prev = T::one();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&p| !m.get(p, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let piv = m.get(r, c).clone();
            for rr in r + 1..m.rows {
                let lead = m.get(rr, c).clone();
                for cc in c + 1..m.cols {
                    let v = piv.mul(m.get(rr, cc)).sub(&lead.mul(m.get(r, cc))).exact_div(&prev);
                    m.set(rr, cc, v);
                }
                m.set(rr, c, T::zero());
            }
            prev = piv;
            r += 1;
        }
        r
    }
}

impl ExactMatrix<Poly> {
    /// Reduced row echelon form over the rational function field.
    pub fn rref_function_field(&self) -> Rref<RatFunc> {
        self.map(|p| RatFunc::from_poly(p.clone())).rref()
    }
}

impl ExactMatrix<Q> {
    /// Rows rescaled to coprime integer entries. Row scaling preserves rank and kernel.
    pub fn integer_rows(&self) -> ExactMatrix<BigInt> {
        let mut data = Vec::with_capacity(self.data.len());
        for r in 0..self.rows {
            let row = self.row(r);
            let lcm = row.iter().fold(BigInt::from(1), |acc, q| acc.lcm(q.denom()));
            let scaled: Vec<BigInt> = row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
            let g = scaled.iter().fold(BigInt::from(0), |acc, v| acc.gcd(v));
            let g = if num_traits::Zero::is_zero(&g) { BigInt::from(1) } else { g };
            data.extend(scaled.into_iter().map(|v| v / &g));
        }
        ExactMatrix { rows: self.rows, cols: self.cols, data }
    }
}

/// Substitutes `t := value` entrywise.
pub fn evaluate<T: Ring + Evaluate>(m: &ExactMatrix<T>, value: &Q) -> Result<ExactMatrix<Q>> {
    let mut data = Vec::with_capacity(m.data.len());
    for r in 0..m.rows {
        for c in 0..m.cols {
            let v = m.get(r, c).evaluate_at(value).ok_or_else(|| Error::Pole { row: r, col: c, value: fmt_q(value) })?;
            data.push(v);
        }
    }
    Ok(ExactMatrix { rows: m.rows, cols: m.cols, data })
}

impl<T: Ring> ExactMatrix<T> {
    pub fn evaluate(&self, value: &Q) -> Result<ExactMatrix<Q>>
    where
        T: Evaluate,
    {
        evaluate(self, value)
    }
}

impl<T: Ring> fmt::Display for ExactMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for ExactMatrix<Q> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self.to_rows().iter().map(|r| r.iter().map(fmt_q).collect()).collect();
        rows.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::int;

    fn qm(rows: &[&[i64]]) -> ExactMatrix<Q> {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    #[test]
    fn proportional_rows() {
        let r = qm(&[&[1, 2], &[2, 4]]).rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);
        assert_eq!(r.kernel_basis, qm(&[&[-2], &[1]]));
    }

    #[test]
    fn empty_matrix_has_rank_zero() {
        let m: ExactMatrix<Q> = ExactMatrix::zeros(0, 0);
        assert_eq!(m.rref().rank, 0);
        let m: ExactMatrix<Q> = ExactMatrix::zeros(0, 3);
        assert_eq!(m.rref().kernel_basis.cols(), 3);
    }

    #[test]
    fn function_field_rank_and_evaluation() {
        let t_minus_1 = Poly::var_plus(&int(-1));
        let m = ExactMatrix::from_rows(vec![vec![t_minus_1.clone(), Poly::zero()], vec![Poly::zero(), Poly::one()]]);
        let r = m.rref_function_field();
        assert_eq!(r.rank, 2);
        assert_eq!(r.kernel_basis.cols(), 0);

        let single = ExactMatrix::from_rows(vec![vec![t_minus_1]]);
        assert_eq!(single.rref_function_field().rank, 1);
        assert_eq!(single.evaluate(&int(1)).unwrap().rank(), 0);
        assert_eq!(single.rank_fraction_free(), 1);
    }

    #[test]
    fn evaluation_examples() {
        let m = ExactMatrix::from_rows(vec![vec![Poly::var_plus(&int(1))]]);
        assert_eq!(m.evaluate(&int(2)).unwrap(), qm(&[&[3]]));
        let m = ExactMatrix::from_rows(vec![vec![Poly::new(vec![int(0), int(-1), int(1)])]]);
        assert_eq!(m.evaluate(&int(0)).unwrap(), qm(&[&[0]]));
        let pole = RatFunc::new(Poly::one(), Poly::var_plus(&int(-1)));
        let m = ExactMatrix::from_rows(vec![vec![pole]]);
        assert!(matches!(m.evaluate(&int(1)), Err(Error::Pole { row: 0, col: 0, .. })));
    }

    #[test]
    fn bareiss_agrees_with_rref() {
        let m = qm(&[&[2, 4, 1, 0], &[1, 2, 3, 5], &[3, 6, 4, 5], &[0, 0, 1, 1]]);
        assert_eq!(m.rank(), 3);
        assert_eq!(m.integer_rows().rank_fraction_free(), 3);
    }
}

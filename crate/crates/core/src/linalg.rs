//! Rank and kernel routines for rational and polynomial matrices.
//!
//! Ranks are first computed modulo a large prime. A full rank modulo `p` is
//! also the rational rank, so only rank-deficient matrices pay for exact
//! fraction-free elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::exactalg::{ExactMatrix, Poly, Q};

const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn inv_mod(a: u64) -> u64 {
    let (mut base, mut exp, mut acc) = (a, PRIME - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

fn reduce(x: &BigInt) -> u64 {
    x.mod_floor(&BigInt::from(PRIME)).to_u64().expect("residue fits")
}

/// Rank of an integer matrix modulo a fixed prime; a lower bound for the rational rank.
pub fn rank_mod_p(m: &ExactMatrix<BigInt>) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<u64>> = (0..rows).map(|r| m.row(r).iter().map(reduce).collect()).collect();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&p| a[p][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        let inv = inv_mod(a[r][c]);
        let pivot_row: Vec<u64> = a[r][c..].iter().map(|&v| mul_mod(v, inv)).collect();
        for row in a.iter_mut().skip(r + 1) {
            let lead = row[c];
            if lead == 0 {
                continue;
            }
            for (dst, &src) in row[c..].iter_mut().zip(&pivot_row) {
                let sub = mul_mod(lead, src);
                *dst = if *dst >= sub { *dst - sub } else { *dst + PRIME - sub };
            }
        }
        r += 1;
    }
    r
}

/// Exact rank of a rational matrix.
pub fn rank(m: &ExactMatrix<Q>) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let ints = m.integer_rows();
    let lower = rank_mod_p(&ints);
    if lower == m.rows().min(m.cols()) {
        return lower;
    }
    ints.rank_fraction_free()
}

/// Dimension of the right kernel.
pub fn kernel_dim(m: &ExactMatrix<Q>) -> usize {
    m.cols() - rank(m)
}

/// Right kernel basis as the columns of a matrix.
pub fn kernel(m: &ExactMatrix<Q>) -> ExactMatrix<Q> {
    if m.rows() > 0 && m.cols() > 0 && rank_mod_p(&m.integer_rows()) == m.cols() {
        return ExactMatrix::zeros(m.cols(), 0);
    }
    m.rref().kernel_basis
}

/// Rank over the rational function field of a polynomial matrix.
///
/// A nonzero `r x r` minor has degree at most `r d`, with `d` the largest
/// entry degree, so it vanishes at no more than `r d` points. The largest rank
/// among evaluations at `min(rows, cols) d + 1` distinct integers is therefore
/// the generic rank.
pub fn rank_poly(m: &ExactMatrix<Poly>) -> usize {
    let bound = m.rows().min(m.cols());
    if bound == 0 {
        return 0;
    }
    let d = m.entries().iter().filter_map(Poly::degree).max().unwrap_or(0);
    let mut best = 0;
    for v in 0..=(bound * d) as i64 {
        let at = m.map(|p| p.eval(&crate::exactalg::int(v)));
        best = best.max(rank(&at));
        if best == bound {
            break;
        }
    }
    best
}

/// Rank over the rational function field by fraction-free elimination in `Q[t]`.
pub fn rank_poly_exact(m: &ExactMatrix<Poly>) -> usize {
    m.rank_fraction_free()
}

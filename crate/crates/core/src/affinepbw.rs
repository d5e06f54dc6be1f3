//! Mode arithmetic of the affinisation of `h4`: brackets
//! `[A_m, B_n] = [A,B]_{m+n} + m k(A,B) delta_{m+n,0} K`, PBW normal ordering,
//! the adjoint and the Sugawara Virasoro modes acting on graded modules.
//!
//! The central element is always specialised to the level `k`, so stored
//! words never contain it.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::exactalg::{int, Ring, Q};
use crate::h4finite::Gen;

/// The mode `gen_index`. Derived ordering is the canonical PBW order:
/// index ascending, ties broken by `F < E < J < I`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Mode {
    pub index: i64,
    pub gen: Gen,
}

impl Mode {
    pub fn new(gen: Gen, index: i64) -> Self {
        Mode { index, gen }
    }

    pub fn e(index: i64) -> Self {
        Mode::new(Gen::E, index)
    }

    pub fn f(index: i64) -> Self {
        Mode::new(Gen::F, index)
    }

    pub fn i(index: i64) -> Self {
        Mode::new(Gen::I, index)
    }

    pub fn j(index: i64) -> Self {
        Mode::new(Gen::J, index)
    }

    /// `L_0`-grade raised by this mode.
    pub fn grade(self) -> i64 {
        -self.index
    }

    pub fn charge(self) -> i64 {
        self.gen.charge()
    }

    pub fn adjoint(self) -> Mode {
        let gen = match self.gen {
            Gen::E => Gen::F,
            Gen::F => Gen::E,
            g => g,
        };
        Mode::new(gen, -self.index)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.gen, self.index)
    }
}

/// `[x, y]` as an optional mode term plus a central scalar.
pub fn bracket_parts(x: Mode, y: Mode, k: &Q) -> (Option<(i64, Mode)>, Q) {
    let term = x.gen.bracket(y.gen).map(|(c, g)| (c, Mode::new(g, x.index + y.index)));
    let central = if x.index + y.index == 0 && x.index != 0 {
        let kap = x.gen.kappa(y.gen);
        if kap != 0 {
            k * int(x.index * kap)
        } else {
            int(0)
        }
    } else {
        int(0)
    };
    (term, central)
}

/// A product of modes. Words built by the rewriting routines are always
/// canonical; raw products may be formed with [`Word::from_modes`].
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(Vec<Mode>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Keeps the given order.
    pub fn from_modes(modes: Vec<Mode>) -> Self {
        Word(modes)
    }

    /// Sorts into canonical order; only meaningful for commuting modes or
    /// when the caller wants the PBW monomial with these factors.
    pub fn sorted(mut modes: Vec<Mode>) -> Self {
        modes.sort();
        Word(modes)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn grade(&self) -> i64 {
        self.0.iter().map(|m| m.grade()).sum()
    }

    pub fn charge(&self) -> i64 {
        self.0.iter().map(|m| m.charge()).sum()
    }

    pub fn first(&self) -> Option<Mode> {
        self.0.first().copied()
    }

    pub fn rest(&self) -> Word {
        Word(self.0.get(1..).unwrap_or(&[]).to_vec())
    }

    pub fn prepend(&self, x: Mode) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(x);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn count(&self, g: Gen) -> usize {
        self.0.iter().filter(|m| m.gen == g).count()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.grade().cmp(&other.grade()).then(self.charge().cmp(&other.charge())).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        let mut idx = 0;
        while idx < self.0.len() {
            let m = self.0[idx];
            let mut run = 1;
            while idx + run < self.0.len() && self.0[idx + run] == m {
                run += 1;
            }
            parts.push(if run == 1 { m.to_string() } else { format!("{m}^{run}") });
            idx += run;
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// Finite linear combination of words with nonzero coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct UEAElement<T> {
    terms: BTreeMap<Word, T>,
}

impl<T: Ring> Default for UEAElement<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Ring> UEAElement<T> {
    pub fn zero() -> Self {
        UEAElement { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::scalar(T::one())
    }

    pub fn scalar(c: T) -> Self {
        Self::term(Word::empty(), c)
    }

    pub fn term(w: Word, c: T) -> Self {
        let mut u = Self::zero();
        u.add_term(w, &c);
        u
    }

    pub fn mode(x: Mode) -> Self {
        Self::term(Word(vec![x]), T::one())
    }

    /// Raw product of modes in the given order.
    pub fn product_of(modes: &[Mode]) -> Self {
        Self::term(Word(modes.to_vec()), T::one())
    }

    pub fn terms(&self) -> &BTreeMap<Word, T> {
        &self.terms
    }

    pub fn coeff(&self, w: &Word) -> T {
        self.terms.get(w).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: &T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(cur) => {
                cur.add_assign(c);
                if cur.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c.clone());
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&T::one().neg()))
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        UEAElement { terms: self.terms.iter().map(|(w, v)| (w.clone(), v.mul(c))).collect() }
    }

    /// Concatenation product without reordering.
    pub fn mul_raw(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.concat(b), &ca.mul(cb));
            }
        }
        out
    }

    pub fn is_normal_ordered(&self) -> bool {
        self.terms.keys().all(Word::is_canonical)
    }
}

impl<T: Ring> fmt::Display for UEAElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("({c}) {w}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn mode_bracket(x: Mode, y: Mode, k: &Q) -> UEAElement<Q> {
    let (term, central) = bracket_parts(x, y, k);
    let mut out = UEAElement::scalar(central);
    if let Some((c, z)) = term {
        out.add_term(Word(vec![z]), &int(c));
    }
    out
}

/// Memoised left multiplication of canonical words by single modes.
#[derive(Default)]
pub struct Orderer {
    k: Q,
    memo: HashMap<(Mode, Word), Vec<(Word, Q)>>,
}

impl Orderer {
    pub fn new(k: &Q) -> Self {
        Orderer { k: k.clone(), memo: HashMap::new() }
    }

    /// `x * w` in canonical form, for canonical `w`.
    pub fn left_mul(&mut self, x: Mode, w: &Word) -> Vec<(Word, Q)> {
        match w.first() {
            None => return vec![(Word(vec![x]), int(1))],
            Some(y) if x <= y => return vec![(w.prepend(x), int(1))],
            _ => {}
        }
        let key = (x, w.clone());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let y = w.first().expect("nonempty");
        let rest = w.rest();
        let mut acc: BTreeMap<Word, Q> = BTreeMap::new();
        // x y rest = y (x rest) + [x, y] rest
        for (w1, c1) in self.left_mul(x, &rest) {
            for (w2, c2) in self.left_mul(y, &w1) {
                accumulate(&mut acc, w2, &c1 * c2);
            }
        }
        let (term, central) = bracket_parts(x, y, &self.k);
        if let Some((c, z)) = term {
            for (w2, c2) in self.left_mul(z, &rest) {
                accumulate(&mut acc, w2, c2 * int(c));
            }
        }
        if !central.is_zero() {
            accumulate(&mut acc, rest, central);
        }
        let out: Vec<(Word, Q)> = acc.into_iter().collect();
        self.memo.insert(key, out.clone());
        out
    }

    /// Canonical form of an arbitrary product of modes.
    pub fn order_word(&mut self, w: &Word) -> Vec<(Word, Q)> {
        let mut acc: Vec<(Word, Q)> = vec![(Word::empty(), int(1))];
        for &x in w.modes().iter().rev() {
            let mut next: BTreeMap<Word, Q> = BTreeMap::new();
            for (u, c) in &acc {
                for (v, d) in self.left_mul(x, u) {
                    accumulate(&mut next, v, c * d);
                }
            }
            acc = next.into_iter().collect();
        }
        acc
    }

    pub fn normal_order<T: Ring>(&mut self, u: &UEAElement<T>) -> UEAElement<T> {
        let mut out = UEAElement::zero();
        for (w, c) in u.terms() {
            if w.is_canonical() {
                out.add_term(w.clone(), c);
                continue;
            }
            for (v, d) in self.order_word(w) {
                out.add_term(v, &c.mul(&T::from_rational(&d)));
            }
        }
        out
    }
}

fn accumulate(acc: &mut BTreeMap<Word, Q>, w: Word, c: Q) {
    if c.is_zero() {
        return;
    }
    match acc.entry(w) {
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
        Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}

/// Rewrites every word into canonical PBW order at level `k`.
pub fn normal_order<T: Ring>(u: &UEAElement<T>, k: &Q) -> UEAElement<T> {
    Orderer::new(k).normal_order(u)
}

/// Normal-ordered product.
pub fn product<T: Ring>(u: &UEAElement<T>, v: &UEAElement<T>, k: &Q) -> UEAElement<T> {
    normal_order(&u.mul_raw(v), k)
}

/// Anti-involution `E_n -> F_{-n}`, `F_n -> E_{-n}`, `I_n -> I_{-n}`,
/// `J_n -> J_{-n}`. The result is returned unordered; normal-order it if needed.
pub fn adjoint<T: Ring>(u: &UEAElement<T>) -> UEAElement<T> {
    let mut out = UEAElement::zero();
    for (w, c) in u.terms() {
        let modes: Vec<Mode> = w.modes().iter().rev().map(|m| m.adjoint()).collect();
        out.add_term(Word(modes), c);
    }
    out
}

/// Central charge of the Sugawara construction.
pub fn central_charge() -> Q {
    int(4)
}

/// `L_0` eigenvalue of a highest-weight vector of weight `(i, j)` at level `k`.
pub fn hw_conformal_weight(i: &Q, j: &Q, k: &Q) -> Q {
    i / k * (j + Q::new(1.into(), 2.into()) - i / (int(2) * k))
}

/// `L_0` eigenvalue of a lowest-weight vector of weight `(i, j)`.
pub fn lw_conformal_weight(i: &Q, j: &Q, k: &Q) -> Q {
    i / k * (j - Q::new(1.into(), 2.into()) - i / (int(2) * k))
}

/// `L_0` eigenvalue of a relaxed ground state with Casimir eigenvalue `h`.
pub fn relaxed_conformal_weight(i: &Q, h: &Q, k: &Q) -> Q {
    h / k + i / k * (Q::new(1.into(), 2.into()) - i / (int(2) * k))
}

/// A graded module on which single modes act.
pub trait ModeModule<T: Ring> {
    type Vector: Clone;

    fn zero_vector(&self) -> Self::Vector;
    fn act(&self, x: Mode, v: &Self::Vector) -> Result<Self::Vector>;
    /// `acc += c v`
    fn axpy(&self, acc: &mut Self::Vector, c: &T, v: &Self::Vector);
    /// Largest grade among the terms of `v`, or `None` for the zero vector.
    fn top_grade(&self, v: &Self::Vector) -> Option<i64>;
}

/// Applies the Sugawara mode
/// `L_n = (1/k) sum :E_r F_{n-r}: + (1/k) sum :I_r J_{n-r}: + (n+1)/(2k) I_n
///        - 1/(2k^2) sum :I_r I_{n-r}:`
/// where `:A_r B_s:` is `A_r B_s` for `r < 0` and `B_s A_r` otherwise.
pub fn sugawara_mode<T: Ring, M: ModeModule<T>>(module: &M, n: i64, k: &Q, v: &M::Vector) -> Result<M::Vector> {
    if k.is_zero() {
        return Err(Error::InvalidParams("the Sugawara construction needs k != 0".into()));
    }
    let mut out = module.zero_vector();
    let Some(d) = module.top_grade(v) else {
        return Ok(out);
    };
    let inv_k = T::from_rational(&k.recip());
    let inv_2k2 = T::from_rational(&(k * k * int(2)).recip());
    let pairs: [(Gen, Gen, T); 3] = [(Gen::E, Gen::F, inv_k.clone()), (Gen::I, Gen::J, inv_k.clone()), (Gen::I, Gen::I, inv_2k2.neg())];
    // Modes with index > grade annihilate, which bounds r on both sides.
    for (a, b, c) in &pairs {
        for r in (n - d).min(0)..=d {
            let s = n - r;
            let (first, second) = if r < 0 { (Mode::new(*b, s), Mode::new(*a, r)) } else { (Mode::new(*a, r), Mode::new(*b, s)) };
            if first.index > d {
                continue;
            }
            let w = module.act(first, v)?;
            if module.top_grade(&w).is_none() {
                continue;
            }
            let w = module.act(second, &w)?;
            module.axpy(&mut out, c, &w);
        }
    }
    let lin = T::from_rational(&(int(n + 1) / (int(2) * k)));
    let w = module.act(Mode::i(n), v)?;
    module.axpy(&mut out, &lin, &w);
    Ok(out)
}

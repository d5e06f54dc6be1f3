//! The finite Lie algebra `h4 = span{E, F, I, J}` with `[E,F] = I`,
//! `[J,E] = E`, `[J,F] = -F`, its invariant forms, automorphisms and the
//! weight modules used as bottom layers for affine induction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{fmt_q, int, is_integer, Ring, Q};

/// Basis generators, ordered `F < E < J < I` (the tie-break of the PBW order).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Gen {
    F,
    E,
    J,
    I,
}

impl Gen {
    pub const ALL: [Gen; 4] = [Gen::E, Gen::F, Gen::I, Gen::J];

    /// `J`-charge: the eigenvalue of `ad J`.
    pub fn charge(self) -> i64 {
        match self {
            Gen::E => 1,
            Gen::F => -1,
            Gen::I | Gen::J => 0,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Gen::E => 'E',
            Gen::F => 'F',
            Gen::I => 'I',
            Gen::J => 'J',
        }
    }

    /// Bracket of two basis elements as `(coefficient, generator)`.
    pub fn bracket(self, other: Gen) -> Option<(i64, Gen)> {
        use Gen::*;
        match (self, other) {
            (E, F) => Some((1, I)),
            (F, E) => Some((-1, I)),
            (J, E) => Some((1, E)),
            (E, J) => Some((-1, E)),
            (J, F) => Some((-1, F)),
            (F, J) => Some((1, F)),
            _ => None,
        }
    }

    /// Form value with `a = 1, b = 0`.
    pub fn kappa(self, other: Gen) -> i64 {
        use Gen::*;
        match (self, other) {
            (E, F) | (F, E) | (I, J) | (J, I) => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Element `e E + f F + i I + j J` of `h4`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct H4Element {
    pub e: Q,
    pub f: Q,
    pub i: Q,
    pub j: Q,
}

impl H4Element {
    pub fn zero() -> Self {
        H4Element { e: int(0), f: int(0), i: int(0), j: int(0) }
    }

    pub fn basis(g: Gen) -> Self {
        let mut x = Self::zero();
        *x.coeff_mut(g) = int(1);
        x
    }

    pub fn coeff(&self, g: Gen) -> &Q {
        match g {
            Gen::E => &self.e,
            Gen::F => &self.f,
            Gen::I => &self.i,
            Gen::J => &self.j,
        }
    }

    pub fn coeff_mut(&mut self, g: Gen) -> &mut Q {
        match g {
            Gen::E => &mut self.e,
            Gen::F => &mut self.f,
            Gen::I => &mut self.i,
            Gen::J => &mut self.j,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        H4Element { e: &self.e + &rhs.e, f: &self.f + &rhs.f, i: &self.i + &rhs.i, j: &self.j + &rhs.j }
    }

    pub fn scale(&self, c: &Q) -> Self {
        H4Element { e: &self.e * c, f: &self.f * c, i: &self.i * c, j: &self.j * c }
    }

    pub fn is_zero(&self) -> bool {
        Gen::ALL.iter().all(|&g| self.coeff(g).is_zero())
    }
}

impl fmt::Display for H4Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> =
            Gen::ALL.iter().filter(|&&g| !self.coeff(g).is_zero()).map(|&g| format!("{} {}", self.coeff(g), g)).collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Lie bracket, extended bilinearly.
pub fn bracket(x: &H4Element, y: &H4Element) -> H4Element {
    let mut out = H4Element::zero();
    for a in Gen::ALL {
        for b in Gen::ALL {
            if let Some((c, g)) = a.bracket(b) {
                let w = x.coeff(a) * y.coeff(b) * int(c);
                *out.coeff_mut(g) += w;
            }
        }
    }
    out
}

/// Parameters of the invariant form: `k(E,F) = k(I,J) = a`, `k(J,J) = b`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BilinearParams {
    a: Q,
    b: Q,
}

impl BilinearParams {
    pub fn new(a: Q, b: Q) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::InvalidParams("the form parameter a must be nonzero".into()));
        }
        Ok(BilinearParams { a, b })
    }

    pub fn a(&self) -> &Q {
        &self.a
    }

    pub fn b(&self) -> &Q {
        &self.b
    }
}

impl Default for BilinearParams {
    fn default() -> Self {
        BilinearParams { a: int(1), b: int(0) }
    }
}

pub fn kappa(x: &H4Element, y: &H4Element, p: &BilinearParams) -> Q {
    let a = &p.a;
    a * (&x.e * &y.f + &x.f * &y.e + &x.i * &y.j + &x.j * &y.i) + &p.b * &x.j * &y.j
}

/// One generator of an automorphism word.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Automorphism {
    Conj,
    Rescale(#[serde(with = "crate::exactalg::serde_q")] Q),
    Shift(#[serde(with = "crate::exactalg::serde_q")] Q),
    AffineShift(#[serde(with = "crate::exactalg::serde_q")] Q),
    SpectralFlow(i64),
}

/// Composite automorphism; `word[0]` is applied last, as in `g0 g1 ... (x)`.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct AutomorphismSpec {
    word: Vec<Automorphism>,
}

impl AutomorphismSpec {
    /// Rejects a zero rescale parameter.
    pub fn new(word: Vec<Automorphism>) -> Result<Self> {
        if word.iter().any(|g| matches!(g, Automorphism::Rescale(a) if a.is_zero())) {
            return Err(Error::InvalidParams("rescale parameter must be nonzero".into()));
        }
        Ok(AutomorphismSpec { word })
    }

    pub fn single(g: Automorphism) -> Result<Self> {
        Self::new(vec![g])
    }

    pub fn word(&self) -> &[Automorphism] {
        &self.word
    }

    /// `self` followed by `other` on the inside: `(self . other)(x) = self(other(x))`.
    pub fn compose(&self, other: &AutomorphismSpec) -> AutomorphismSpec {
        let mut word = self.word.clone();
        word.extend(other.word.iter().cloned());
        AutomorphismSpec { word }
    }
}

fn apply_generator(g: &Automorphism, x: &H4Element) -> Result<H4Element> {
    Ok(match g {
        Automorphism::Conj => H4Element { e: -&x.f, f: -&x.e, i: -&x.i, j: -&x.j },
        Automorphism::Rescale(a) => {
            let inv = a.recip();
            H4Element { e: &x.e * &inv, f: &x.f * &inv, i: &x.i * &inv * &inv, j: x.j.clone() }
        }
        // J -> J - beta I
        Automorphism::Shift(b) => H4Element { e: x.e.clone(), f: x.f.clone(), i: &x.i - b * &x.j, j: x.j.clone() },
        Automorphism::AffineShift(_) | Automorphism::SpectralFlow(_) => {
            return Err(Error::Inapplicable(format!("{g:?} only acts on the affine algebra")))
        }
    })
}

pub fn apply_automorphism(spec: &AutomorphismSpec, x: &H4Element) -> Result<H4Element> {
    let mut out = x.clone();
    for g in spec.word.iter().rev() {
        out = apply_generator(g, &out)?;
    }
    Ok(out)
}

/// Bottom-layer kinds.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModuleKind {
    HwVerma,
    LwVerma,
    OneDim,
    DenseIrr,
    DensePlus,
    DenseMinus,
    DenseZero,
}

impl ModuleKind {
    pub fn is_dense(self) -> bool {
        matches!(self, ModuleKind::DenseIrr | ModuleKind::DensePlus | ModuleKind::DenseMinus | ModuleKind::DenseZero)
    }
}

/// Basis scaling of a dense bottom layer.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DenseNormalization {
    /// `E` maps each state to the next with coefficient 1.
    RaiseUnit,
    /// `F` maps each state to the previous with coefficient 1.
    LowerUnit,
}

/// Weight module of `h4` with one-dimensional weight spaces, states indexed by
/// the integer offset `s` from the anchor: `J |s> = (j + s) |s>`, `I = i`,
/// `E |s> = e(s) |s+1>`, `F |s> = f(s) |s-1>`.
#[derive(Clone, PartialEq, Debug)]
pub struct FiniteWeightModule<T> {
    kind: ModuleKind,
    i: Q,
    j: T,
    h: Q,
    normalization: DenseNormalization,
    window: (i64, i64),
}

impl<T: Ring> FiniteWeightModule<T> {
    /// No parameter validation; callers own the criteria.
    pub(crate) fn from_parts(kind: ModuleKind, i: Q, j: T, h: Q, normalization: DenseNormalization, window: (i64, i64)) -> Self {
        let normalization = match kind {
            ModuleKind::DensePlus => DenseNormalization::LowerUnit,
            ModuleKind::DenseMinus => DenseNormalization::RaiseUnit,
            _ => normalization,
        };
        FiniteWeightModule { kind, i, j, h, normalization, window }
    }

    pub fn kind(&self) -> ModuleKind {
        self.kind
    }

    pub fn i(&self) -> &Q {
        &self.i
    }

    /// `J`-eigenvalue at offset zero.
    pub fn j(&self) -> &T {
        &self.j
    }

    /// Casimir eigenvalue for dense kinds; `i j` for highest weight, `i (j - 1)`
    /// for lowest weight and 0 for the one-dimensional module.
    pub fn h(&self) -> &Q {
        &self.h
    }

    pub fn normalization(&self) -> DenseNormalization {
        self.normalization
    }

    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    pub fn with_window(&self, window: (i64, i64)) -> Self {
        FiniteWeightModule { window, ..self.clone() }
    }

    pub fn with_normalization(&self, normalization: DenseNormalization) -> Self {
        Self::from_parts(self.kind, self.i.clone(), self.j.clone(), self.h.clone(), normalization, self.window)
    }

    /// Whether offset `s` carries a state (ignoring the window).
    pub fn supports(&self, s: i64) -> bool {
        match self.kind {
            ModuleKind::HwVerma => s <= 0,
            ModuleKind::LwVerma => s >= 0,
            ModuleKind::OneDim => s == 0,
            _ => true,
        }
    }

    /// Offsets inside both the support and the window.
    pub fn window_offsets(&self) -> Vec<i64> {
        (self.window.0..=self.window.1).filter(|&s| self.supports(s)).collect()
    }

    pub fn j_at(&self, s: i64) -> T {
        self.j.add(&T::from_int(s))
    }

    fn i_times_j_at(&self, s: i64) -> T {
        self.j_at(s).mul(&T::from_rational(&self.i))
    }

    /// Coefficient of `|s+1>` in `E |s>`.
    pub fn e(&self, s: i64) -> T {
        if !self.supports(s) || !self.supports(s + 1) {
            return T::zero();
        }
        match self.kind {
            ModuleKind::HwVerma => T::from_rational(&(-&self.i * int(s))),
            ModuleKind::LwVerma => T::one(),
            ModuleKind::OneDim => T::zero(),
            ModuleKind::DenseZero => {
                if s >= 0 {
                    T::one()
                } else {
                    T::zero()
                }
            }
            _ => match self.normalization {
                DenseNormalization::RaiseUnit => T::one(),
                DenseNormalization::LowerUnit => T::from_rational(&self.h).sub(&self.i_times_j_at(s)),
            },
        }
    }

    /// Coefficient of `|s-1>` in `F |s>`.
    pub fn f(&self, s: i64) -> T {
        if !self.supports(s) || !self.supports(s - 1) {
            return T::zero();
        }
        match self.kind {
            ModuleKind::HwVerma => T::one(),
            ModuleKind::LwVerma => T::from_rational(&(-&self.i * int(s))),
            ModuleKind::OneDim => T::zero(),
            ModuleKind::DenseZero => {
                if s <= 0 {
                    T::one()
                } else {
                    T::zero()
                }
            }
            _ => match self.normalization {
                DenseNormalization::RaiseUnit => T::from_rational(&self.h).sub(&self.i_times_j_at(s - 1)),
                DenseNormalization::LowerUnit => T::one(),
            },
        }
    }

    /// Eigenvalue of `Q = FE + IJ` at offset `s`.
    pub fn casimir_at(&self, s: i64) -> T {
        self.e(s).mul(&self.f(s + 1)).add(&self.i_times_j_at(s))
    }

    /// Action of a basis generator on `|s>` as `(target offset, coefficient)`.
    pub fn act(&self, g: Gen, s: i64) -> Option<(i64, T)> {
        if !self.supports(s) {
            return None;
        }
        let (t, c) = match g {
            Gen::E => (s + 1, self.e(s)),
            Gen::F => (s - 1, self.f(s)),
            Gen::I => (s, T::from_rational(&self.i)),
            Gen::J => (s, self.j_at(s)),
        };
        (!c.is_zero()).then_some((t, c))
    }
}

impl FiniteWeightModule<Q> {
    /// Whether the module is reducible by the finite classification.
    pub fn is_reducible(&self) -> bool {
        match self.kind {
            ModuleKind::HwVerma | ModuleKind::LwVerma => self.i.is_zero(),
            ModuleKind::OneDim | ModuleKind::DenseIrr => false,
            ModuleKind::DensePlus | ModuleKind::DenseMinus | ModuleKind::DenseZero => true,
        }
    }

    /// Operator of `x` on the window states, in increasing offset order.
    /// Components leaving the window are dropped.
    pub fn operator_matrix(&self, x: &H4Element) -> crate::exactalg::ExactMatrix<Q> {
        let offsets = self.window_offsets();
        let n = offsets.len();
        let mut m = crate::exactalg::ExactMatrix::zeros(n, n);
        for (col, &s) in offsets.iter().enumerate() {
            for g in Gen::ALL {
                let c = x.coeff(g);
                if c.is_zero() {
                    continue;
                }
                if let Some((t, v)) = self.act(g, s) {
                    if let Some(row) = offsets.iter().position(|&o| o == t) {
                        let cur = m.get(row, col) + c * v;
                        m.set(row, col, cur);
                    }
                }
            }
        }
        m
    }

    /// Whether `I` acts as zero. Only meaningful on finite-dimensional modules.
    pub fn check_i_trivial(&self) -> Result<bool> {
        match self.kind {
            ModuleKind::OneDim | ModuleKind::DenseZero => Ok(self.operator_matrix(&H4Element::basis(Gen::I)).is_zero()),
            _ => Err(Error::Inapplicable(format!("{:?} is infinite-dimensional", self.kind))),
        }
    }

    pub fn descriptor(&self) -> ModuleDescriptor {
        ModuleDescriptor { kind: self.kind, i: self.i.clone(), j: self.j.clone(), h: self.h.clone(), window: self.window }
    }
}

/// JSON form of a numeric bottom layer.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ModuleDescriptor {
    pub kind: ModuleKind,
    #[serde(with = "crate::exactalg::serde_q")]
    pub i: Q,
    #[serde(with = "crate::exactalg::serde_q")]
    pub j: Q,
    #[serde(with = "crate::exactalg::serde_q")]
    pub h: Q,
    pub window: (i64, i64),
}

/// Whether `h = i (j + m)` for some integer `m` (with `i != 0`).
pub fn in_reducibility_class(i: &Q, j: &Q, h: &Q) -> bool {
    !i.is_zero() && is_integer(&(h / i - j))
}

/// Builds a numeric bottom layer, checking the classification criteria.
/// `h` is ignored for highest and lowest weight kinds.
pub fn build_module(kind: ModuleKind, i: Q, j: Q, h: Q, window: (i64, i64)) -> Result<FiniteWeightModule<Q>> {
    build_module_normalized(kind, i, j, h, window, DenseNormalization::RaiseUnit)
}

pub fn build_module_normalized(
    kind: ModuleKind,
    i: Q,
    j: Q,
    h: Q,
    window: (i64, i64),
    normalization: DenseNormalization,
) -> Result<FiniteWeightModule<Q>> {
    if window.0 > window.1 {
        return Err(Error::InvalidParams(format!("empty offset window {window:?}")));
    }
    let h = match kind {
        ModuleKind::DenseIrr => {
            let reducible = if i.is_zero() { h.is_zero() } else { in_reducibility_class(&i, &j, &h) };
            if reducible {
                return Err(Error::InvalidParams(format!(
                    "dense module with i = {}, j = {}, h = {} is reducible: h = i(j+m) for an integer m",
                    fmt_q(&i),
                    fmt_q(&j),
                    fmt_q(&h)
                )));
            }
            h
        }
        ModuleKind::DensePlus | ModuleKind::DenseMinus => {
            if i.is_zero() {
                return Err(Error::InvalidParams("reducible dense modules with one extremal vector need i != 0".into()));
            }
            if !in_reducibility_class(&i, &j, &h) {
                return Err(Error::InvalidParams(format!(
                    "J-eigenvalues must lie in [h/i]: h/i - j = {} is not an integer",
                    fmt_q(&(&h / &i - &j))
                )));
            }
            h
        }
        ModuleKind::DenseZero => {
            if !i.is_zero() || !h.is_zero() {
                return Err(Error::InvalidParams("the doubly extremal dense module requires i = 0 and h = 0".into()));
            }
            h
        }
        ModuleKind::OneDim => {
            if !i.is_zero() {
                return Err(Error::InvalidParams("one-dimensional modules require i = 0 (I acts trivially)".into()));
            }
            int(0)
        }
        ModuleKind::HwVerma => &i * &j,
        ModuleKind::LwVerma => &i * (&j - int(1)),
    };
    Ok(FiniteWeightModule::from_parts(kind, i, j, h, normalization, window))
}

/// Isomorphism classes of the finite weight modules.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FiniteLabel {
    /// Highest-weight Verma module with highest weight `(i, j)`.
    VermaPlus {
        #[serde(with = "crate::exactalg::serde_q")]
        i: Q,
        #[serde(with = "crate::exactalg::serde_q")]
        j: Q,
    },
    VermaMinus {
        #[serde(with = "crate::exactalg::serde_q")]
        i: Q,
        #[serde(with = "crate::exactalg::serde_q")]
        j: Q,
    },
    OneDim {
        #[serde(with = "crate::exactalg::serde_q")]
        j: Q,
    },
    /// Irreducible dense module; `j` is any representative of its class.
    Dense {
        #[serde(with = "crate::exactalg::serde_q")]
        i: Q,
        #[serde(with = "crate::exactalg::serde_q")]
        j: Q,
        #[serde(with = "crate::exactalg::serde_q")]
        h: Q,
    },
    DensePlus {
        #[serde(with = "crate::exactalg::serde_q")]
        i: Q,
        #[serde(with = "crate::exactalg::serde_q")]
        h: Q,
    },
    DenseMinus {
        #[serde(with = "crate::exactalg::serde_q")]
        i: Q,
        #[serde(with = "crate::exactalg::serde_q")]
        h: Q,
    },
    DenseZero {
        #[serde(with = "crate::exactalg::serde_q")]
        j: Q,
    },
}

/// Fractional part in `[0, 1)`, the canonical representative of `j + Z`.
pub fn class_rep(j: &Q) -> Q {
    j - j.floor()
}

impl FiniteLabel {
    /// Same label with dense classes reduced to their canonical representative.
    pub fn canonical(&self) -> FiniteLabel {
        match self {
            FiniteLabel::Dense { i, j, h } => FiniteLabel::Dense { i: i.clone(), j: class_rep(j), h: h.clone() },
            other => other.clone(),
        }
    }
}

fn twist_finite_generator(g: &Automorphism, label: &FiniteLabel) -> Result<FiniteLabel> {
    use FiniteLabel::*;
    Ok(match g {
        Automorphism::Conj => match label {
            VermaPlus { i, j } => VermaMinus { i: -i, j: -j },
            VermaMinus { i, j } => VermaPlus { i: -i, j: -j },
            OneDim { j } => OneDim { j: -j },
            Dense { i, j, h } => Dense { i: -i, j: -j, h: h + i },
            DensePlus { i, h } => DenseMinus { i: -i, h: h + i },
            DenseMinus { i, h } => DensePlus { i: -i, h: h + i },
            DenseZero { j } => DenseZero { j: -j },
        },
        Automorphism::Rescale(a) => {
            let a2 = a * a;
            match label {
                VermaPlus { i, j } => VermaPlus { i: &a2 * i, j: j.clone() },
                VermaMinus { i, j } => VermaMinus { i: &a2 * i, j: j.clone() },
                Dense { i, j, h } => Dense { i: &a2 * i, j: j.clone(), h: &a2 * h },
                DensePlus { i, h } => DensePlus { i: &a2 * i, h: &a2 * h },
                DenseMinus { i, h } => DenseMinus { i: &a2 * i, h: &a2 * h },
                OneDim { .. } | DenseZero { .. } => label.clone(),
            }
        }
        Automorphism::Shift(b) => match label {
            VermaPlus { i, j } => VermaPlus { i: i.clone(), j: j + b * i },
            VermaMinus { i, j } => VermaMinus { i: i.clone(), j: j + b * i },
            Dense { i, j, h } => Dense { i: i.clone(), j: j + b * i, h: h + b * i * i },
            DensePlus { i, h } => DensePlus { i: i.clone(), h: h + b * i * i },
            DenseMinus { i, h } => DenseMinus { i: i.clone(), h: h + b * i * i },
            OneDim { .. } | DenseZero { .. } => label.clone(),
        },
        Automorphism::AffineShift(_) | Automorphism::SpectralFlow(_) => {
            return Err(Error::Inapplicable(format!("{g:?} does not act on h4-modules")))
        }
    })
}

/// Image of a module label under the twist functor of `spec`.
pub fn twist_labels(spec: &AutomorphismSpec, label: &FiniteLabel) -> Result<FiniteLabel> {
    let mut out = label.clone();
    for g in spec.word.iter().rev() {
        out = twist_finite_generator(g, &out)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use proptest::prelude::*;

    fn b(g: Gen) -> H4Element {
        H4Element::basis(g)
    }

    #[test]
    fn bracket_table() {
        assert_eq!(bracket(&b(Gen::J), &b(Gen::E)), b(Gen::E));
        assert!(bracket(&b(Gen::E), &b(Gen::E)).is_zero());
        assert_eq!(bracket(&b(Gen::E), &b(Gen::F)), b(Gen::I));
        assert_eq!(bracket(&b(Gen::F), &b(Gen::E)), b(Gen::I).scale(&int(-1)));
        assert_eq!(bracket(&b(Gen::J), &b(Gen::F)), b(Gen::F).scale(&int(-1)));
        for g in Gen::ALL {
            assert!(bracket(&b(Gen::I), &b(g)).is_zero());
        }
    }

    #[test]
    fn kappa_values() {
        let p = BilinearParams::default();
        assert_eq!(kappa(&b(Gen::E), &b(Gen::F), &p), int(1));
        assert_eq!(kappa(&b(Gen::E), &b(Gen::E), &p), int(0));
        let lhs = kappa(&bracket(&b(Gen::J), &b(Gen::E)), &b(Gen::F), &p) + kappa(&b(Gen::E), &bracket(&b(Gen::J), &b(Gen::F)), &p);
        assert_eq!(lhs, int(0));
        assert!(BilinearParams::new(int(0), int(1)).is_err());
    }

    #[test]
    fn jacobi_and_invariance_on_basis_triples() {
        let params = [BilinearParams::default(), BilinearParams::new(rat(3, 2), rat(-5, 7)).unwrap()];
        for x in Gen::ALL {
            for y in Gen::ALL {
                for z in Gen::ALL {
                    let (x, y, z) = (b(x), b(y), b(z));
                    let jac = bracket(&x, &bracket(&y, &z)).add(&bracket(&y, &bracket(&z, &x))).add(&bracket(&z, &bracket(&x, &y)));
                    assert!(jac.is_zero());
                    for p in &params {
                        assert_eq!(kappa(&bracket(&x, &y), &z, p), kappa(&x, &bracket(&y, &z), p));
                    }
                }
            }
        }
    }

    #[test]
    fn automorphism_tables() {
        let conj = AutomorphismSpec::single(Automorphism::Conj).unwrap();
        assert_eq!(apply_automorphism(&conj, &b(Gen::E)).unwrap(), b(Gen::F).scale(&int(-1)));
        assert_eq!(apply_automorphism(&conj, &b(Gen::I)).unwrap(), b(Gen::I).scale(&int(-1)));
        let resc = AutomorphismSpec::single(Automorphism::Rescale(int(3))).unwrap();
        assert_eq!(apply_automorphism(&resc, &b(Gen::I)).unwrap(), b(Gen::I).scale(&rat(1, 9)));
        let sh = AutomorphismSpec::single(Automorphism::Shift(int(2))).unwrap();
        assert_eq!(apply_automorphism(&sh, &b(Gen::J)).unwrap(), b(Gen::J).add(&b(Gen::I).scale(&int(-2))));
        assert!(AutomorphismSpec::single(Automorphism::Rescale(int(0))).is_err());
        let sf = AutomorphismSpec::single(Automorphism::SpectralFlow(1)).unwrap();
        assert!(apply_automorphism(&sf, &b(Gen::E)).is_err());
    }

    #[test]
    fn label_twists() {
        let sh = AutomorphismSpec::single(Automorphism::Shift(rat(1, 2))).unwrap();
        let v = FiniteLabel::VermaPlus { i: int(4), j: int(1) };
        assert_eq!(twist_labels(&sh, &v).unwrap(), FiniteLabel::VermaPlus { i: int(4), j: int(3) });
        let conj = AutomorphismSpec::single(Automorphism::Conj).unwrap();
        let d = FiniteLabel::Dense { i: int(2), j: rat(1, 3), h: int(1) };
        assert_eq!(twist_labels(&conj, &d).unwrap(), FiniteLabel::Dense { i: int(-2), j: rat(-1, 3), h: int(3) });
        assert_eq!(twist_labels(&conj, &v).unwrap(), FiniteLabel::VermaMinus { i: int(-4), j: int(-1) });
        let dp = FiniteLabel::DensePlus { i: int(2), h: int(1) };
        assert_eq!(twist_labels(&conj.compose(&conj), &dp).unwrap(), dp);
    }

    #[test]
    fn module_examples() {
        let i = rat(5, 2);
        let hw = build_module(ModuleKind::HwVerma, i.clone(), rat(1, 3), int(0), (-6, 0)).unwrap();
        for n in 1..6 {
            assert_eq!(hw.e(-n), &i * int(n));
        }
        assert_eq!(hw.e(0), int(0));
        let dense = build_module(ModuleKind::DenseIrr, int(2), rat(1, 3), int(1), (-5, 5)).unwrap();
        for s in -5..5 {
            assert_eq!(dense.e(s) * dense.f(s + 1), int(1) - int(2) * (rat(1, 3) + int(s)));
        }
        let one = build_module(ModuleKind::OneDim, int(0), int(7), int(0), (-2, 2)).unwrap();
        assert_eq!(one.window_offsets(), vec![0]);
        assert_eq!(one.act(Gen::E, 0), None);
        assert_eq!(one.act(Gen::J, 0), Some((0, int(7))));
        assert!(one.check_i_trivial().unwrap());
        let zero = build_module(ModuleKind::DenseZero, int(0), rat(1, 2), int(0), (-4, 4)).unwrap();
        assert!(zero.check_i_trivial().unwrap());
        assert!(matches!(hw.check_i_trivial(), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn module_criteria() {
        assert!(build_module(ModuleKind::DenseIrr, int(2), int(1), int(4), (-3, 3)).is_err());
        assert!(build_module(ModuleKind::DenseIrr, int(0), int(1), int(0), (-3, 3)).is_err());
        assert!(build_module(ModuleKind::DensePlus, int(2), int(1), int(4), (-3, 3)).is_ok());
        assert!(build_module(ModuleKind::DensePlus, int(2), int(1), int(3), (-3, 3)).is_err());
        assert!(build_module(ModuleKind::DenseZero, int(0), int(1), int(1), (-3, 3)).is_err());
        assert!(build_module(ModuleKind::OneDim, int(1), int(1), int(0), (0, 0)).is_err());
    }

    #[test]
    fn dense_plus_contains_highest_weight_submodule() {
        // h/i = 1/2: the state with J = 1/2 is killed by E, the next one is not killed by F.
        let m = build_module(ModuleKind::DensePlus, int(2), rat(1, 2), int(1), (-4, 4)).unwrap();
        assert_eq!(m.e(0), int(0));
        assert_eq!(m.f(1), int(1));
        let minus = build_module(ModuleKind::DenseMinus, int(2), rat(1, 2), int(1), (-4, 4)).unwrap();
        assert_eq!(minus.f(1), int(0));
        assert_eq!(minus.e(0), int(1));
    }

    #[test]
    fn dense_zero_structure() {
        let m = build_module(ModuleKind::DenseZero, int(0), int(0), int(0), (-5, 5)).unwrap();
        // Offsets <= -1 close under E (highest weight part), offsets >= 1 under F.
        assert_eq!(m.e(-1), int(0));
        assert_eq!(m.f(1), int(0));
        let hw = build_module(ModuleKind::HwVerma, int(0), int(-1), int(0), (-4, 0)).unwrap();
        let lw = build_module(ModuleKind::LwVerma, int(0), int(1), int(0), (0, 4)).unwrap();
        let mut dims = std::collections::BTreeMap::new();
        for s in hw.window_offsets() {
            *dims.entry(s - 1).or_insert(0) += 1;
        }
        for s in lw.window_offsets() {
            *dims.entry(s + 1).or_insert(0) += 1;
        }
        *dims.entry(0).or_insert(0) += 1;
        for s in -5..=5 {
            assert_eq!(dims[&s], 1, "offset {s}");
        }
    }

    fn arb_q() -> impl Strategy<Value = Q> {
        (-12i64..12, 1i64..6).prop_map(|(n, d)| rat(n, d))
    }

    fn commutator_vanishes(m: &FiniteWeightModule<Q>, g: Gen) -> bool {
        // Compare Q.g and g.Q on states whose images stay inside the window.
        let offsets = m.window_offsets();
        offsets.iter().all(|&s| match m.act(g, s) {
            Some((t, c)) if offsets.contains(&t) => &c * m.casimir_at(t) == m.casimir_at(s) * &c,
            _ => true,
        })
    }

    proptest! {
        #[test]
        fn casimir_is_central(i in arb_q(), j in arb_q(), h in arb_q(), raise in any::<bool>()) {
            let norm = if raise { DenseNormalization::RaiseUnit } else { DenseNormalization::LowerUnit };
            let mut modules = vec![
                build_module(ModuleKind::HwVerma, i.clone(), j.clone(), int(0), (-6, 0)).unwrap(),
                build_module(ModuleKind::LwVerma, i.clone(), j.clone(), int(0), (0, 6)).unwrap(),
                build_module(ModuleKind::DenseZero, int(0), j.clone(), int(0), (-6, 6)).unwrap(),
            ];
            if let Ok(d) = build_module_normalized(ModuleKind::DenseIrr, i.clone(), j.clone(), h.clone(), (-6, 6), norm) {
                for s in -6..6 {
                    prop_assert_eq!(d.e(s) * d.f(s + 1), &h - &i * (&j + int(s)));
                }
                modules.push(d);
            }
            for m in &modules {
                for g in Gen::ALL {
                    prop_assert!(commutator_vanishes(m, g));
                }
            }
        }

        #[test]
        fn automorphism_laws(a in arb_q(), a2 in arb_q(), beta in arb_q()) {
            prop_assume!(!a.is_zero() && !a2.is_zero());
            use Automorphism::*;
            let spec = |w: Vec<Automorphism>| AutomorphismSpec::new(w).unwrap();
            for g in Gen::ALL {
                let x = b(g);
                let lhs = apply_automorphism(&spec(vec![Rescale(a.clone()), Rescale(a2.clone())]), &x).unwrap();
                let rhs = apply_automorphism(&spec(vec![Rescale(&a * &a2)]), &x).unwrap();
                prop_assert_eq!(lhs, rhs);
                let lhs = apply_automorphism(&spec(vec![Rescale(a.clone()), Shift(beta.clone())]), &x).unwrap();
                let rhs = apply_automorphism(&spec(vec![Shift(&beta / (&a * &a)), Rescale(a.clone())]), &x).unwrap();
                prop_assert_eq!(lhs, rhs);
                let lhs = apply_automorphism(&spec(vec![Shift(beta.clone()), Conj]), &x).unwrap();
                let rhs = apply_automorphism(&spec(vec![Conj, Shift(beta.clone())]), &x).unwrap();
                prop_assert_eq!(lhs, rhs);
                prop_assert_eq!(apply_automorphism(&spec(vec![Conj, Conj]), &x).unwrap(), x);
            }
        }

        #[test]
        fn kappa_pullbacks(a in arb_q(), bb in arb_q(), alpha in arb_q(), beta in arb_q()) {
            prop_assume!(!a.is_zero() && !alpha.is_zero());
            let p = BilinearParams::new(a.clone(), bb.clone()).unwrap();
            let resc_p = BilinearParams::new(&a / (&alpha * &alpha), bb.clone()).unwrap();
            let shift_p = BilinearParams::new(a.clone(), &bb - int(2) * &beta * &a).unwrap();
            let conj = AutomorphismSpec::single(Automorphism::Conj).unwrap();
            let resc = AutomorphismSpec::single(Automorphism::Rescale(alpha.clone())).unwrap();
            let shift = AutomorphismSpec::single(Automorphism::Shift(beta.clone())).unwrap();
            for x in Gen::ALL {
                for y in Gen::ALL {
                    let (x, y) = (b(x), b(y));
                    let pull = |s: &AutomorphismSpec| kappa(&apply_automorphism(s, &x).unwrap(), &apply_automorphism(s, &y).unwrap(), &p);
                    prop_assert_eq!(pull(&conj), kappa(&x, &y, &p));
                    prop_assert_eq!(pull(&resc), kappa(&x, &y, &resc_p));
                    prop_assert_eq!(pull(&shift), kappa(&x, &y, &shift_p));
                }
            }
        }
    }
}

//! Singular vectors of highest-weight Verma modules with integer `i >= 1`.
//!
//! A singular vector of charge `m` and grade `i m` is a combination of
//! monomials `I_{-nu} E_{-mu} |i, j>` with `mu` having exactly `m` parts, each
//! at most `i`. It is labelled by `lambda = nu + mu` and `mu`; the
//! coefficients are fixed by `J_n chi = 0` for `n >= 1`.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::affinepbw::{hw_conformal_weight, normal_order, sugawara_mode, Mode, UEAElement, Word};
use crate::affmodules::{module_for, AffineLabel, BasisVector, ModuleVector};
use crate::error::{Error, Result};
use crate::exactalg::{fmt_q, int, ExactMatrix, Ring, Q};
use crate::h4finite::Gen;
use crate::linalg;
use crate::partitions::{bounded_subpartitions, enumerate, Partition};

/// Monomial `I_{-nu} E_{-mu}`, keyed by `(lambda, mu)` with `nu = lambda \ mu`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct SingularKey {
    pub lambda: Partition,
    pub mu: Partition,
}

impl SingularKey {
    fn from_monomial(nu: &Partition, mu: &Partition) -> Self {
        let mut parts = nu.parts().to_vec();
        parts.extend_from_slice(mu.parts());
        SingularKey { lambda: Partition::new(parts).expect("positive parts"), mu: mu.clone() }
    }

    pub fn nu(&self) -> Partition {
        self.lambda.remove(&self.mu).expect("mu is a subpartition of lambda")
    }

    fn modes(&self) -> Vec<Mode> {
        let mut modes: Vec<Mode> = self.nu().parts().iter().map(|&p| Mode::i(-(p as i64))).collect();
        modes.extend(self.mu.parts().iter().map(|&p| Mode::e(-(p as i64))));
        modes
    }

    /// The monomial as a canonical word in negative modes.
    pub fn word(&self) -> Word {
        Word::sorted(self.modes())
    }
}

// Display order: larger E-parts first, then larger I-parts.
impl Ord for SingularKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (Reverse(&self.mu), Reverse(self.nu())).cmp(&(Reverse(&other.mu), Reverse(other.nu())))
    }
}

impl PartialOrd for SingularKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SingularKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // I-modes to the left of E-modes; all of them commute.
        write!(f, "{}", Word::from_modes(self.modes()))
    }
}

/// Coefficients of a singular vector, normalised so that `E_{-i}^m` has coefficient 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SingularCoefficients {
    pub i: u32,
    pub m: u32,
    pub coeffs: BTreeMap<SingularKey, Q>,
}

/// All admissible keys for `(i, m)`.
pub fn singular_keys(i: u32, m: u32) -> Vec<SingularKey> {
    let mut keys: Vec<SingularKey> = enumerate(i * m)
        .into_iter()
        .flat_map(|lambda| {
            bounded_subpartitions(&lambda, m as usize, i).into_iter().map(move |mu| SingularKey { lambda: lambda.clone(), mu })
        })
        .collect();
    keys.sort();
    keys
}

fn normalization_key(i: u32, m: u32) -> SingularKey {
    let top = Partition::rectangle(i, m as usize);
    SingularKey { lambda: top.clone(), mu: top }
}

fn check_sizes(i: u32, m: u32) -> Result<()> {
    if i == 0 || m == 0 {
        return Err(Error::InvalidParams("singular vectors are solved for integers i >= 1 and m >= 1".into()));
    }
    Ok(())
}

/// One linear equation: the coefficient of `target` in `mode chi`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Constraint {
    pub mode: Mode,
    pub target: (Partition, Partition),
    pub terms: BTreeMap<SingularKey, Q>,
}

impl Constraint {
    /// Equal to `other` up to a nonzero scalar.
    pub fn proportional_to(&self, other: &BTreeMap<SingularKey, Q>) -> bool {
        if self.terms.len() != other.len() {
            return false;
        }
        let Some((k0, c0)) = self.terms.iter().next() else {
            return true;
        };
        let Some(d0) = other.get(k0) else {
            return false;
        };
        self.terms.iter().all(|(k, c)| other.get(k).is_some_and(|d| c * d0 == d * c0))
    }

    pub fn evaluate(&self, c: &SingularCoefficients) -> Q {
        self.terms.iter().fold(int(0), |acc, (k, a)| acc + a * c.coeffs.get(k).cloned().unwrap_or_else(|| int(0)))
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.terms.iter().map(|(k, c)| format!("{} C({}, {})", fmt_q(c), k.nu(), k.mu)).collect();
        write!(f, "[{}] {} = 0", self.mode, terms.join(" + "))
    }
}

type Monomial = (Partition, Partition);

fn collect(mode: Mode, rows: BTreeMap<Monomial, BTreeMap<SingularKey, Q>>) -> Vec<Constraint> {
    rows.into_iter()
        .filter_map(|(target, mut terms)| {
            terms.retain(|_, c| !c.is_zero());
            (!terms.is_empty()).then_some(Constraint { mode, target, terms })
        })
        .collect()
}

fn add(rows: &mut BTreeMap<Monomial, BTreeMap<SingularKey, Q>>, target: Monomial, key: &SingularKey, c: Q) {
    *rows.entry(target).or_default().entry(key.clone()).or_insert_with(|| int(0)) += c;
}

/// Equations from `J_n chi = 0`, `1 <= n <= i m`, at level 1.
///
/// `J_n` removes an `I_{-n}` with weight `n` per copy, or lowers one `E`-part
/// exceeding `n` by `n`. Each part position contributes separately, so
/// repeated parts carry their multiplicity.
pub fn build_constraints(i: u32, m: u32) -> Result<Vec<Constraint>> {
    check_sizes(i, m)?;
    let keys = singular_keys(i, m);
    let mut out = Vec::new();
    for n in 1..=i * m {
        let mut rows = BTreeMap::new();
        for key in &keys {
            let nu = key.nu();
            let copies = nu.mult(n);
            if copies > 0 {
                let target = (nu.remove_part(n).expect("part present"), key.mu.clone());
                add(&mut rows, target, key, int(n as i64 * copies as i64));
            }
            for k in 1..=key.mu.len() {
                if let Some(lowered) = key.mu.unbump(k, n) {
                    add(&mut rows, (nu.clone(), lowered), key, int(1));
                }
            }
        }
        out.extend(collect(Mode::j(n as i64), rows));
    }
    Ok(out)
}

/// Equations from `-F_1 chi = 0` at level 1: an `E_{-r}` becomes `I_{-(r-1)}`
/// for `r > 1` and the scalar `i - 1` for `r = 1`.
pub fn f1_constraints(i: u32, m: u32) -> Result<Vec<Constraint>> {
    check_sizes(i, m)?;
    let mut rows = BTreeMap::new();
    for key in singular_keys(i, m) {
        let nu = key.nu();
        for &r in key.mu.parts() {
            let rest = key.mu.remove_part(r).expect("part present");
            if r > 1 {
                add(&mut rows, (nu.insert(r - 1), rest), &key, int(1));
            } else {
                add(&mut rows, (nu.clone(), rest), &key, int(i as i64 - 1));
            }
        }
    }
    Ok(collect(Mode::f(1), rows))
}

/// Coefficient matrix with one column per key in [`singular_keys`] order.
pub fn constraint_matrix(keys: &[SingularKey], constraints: &[Constraint]) -> ExactMatrix<Q> {
    let index: BTreeMap<&SingularKey, usize> = keys.iter().enumerate().map(|(p, k)| (k, p)).collect();
    let mut mat = ExactMatrix::zeros(constraints.len(), keys.len());
    for (r, c) in constraints.iter().enumerate() {
        for (k, v) in &c.terms {
            mat.set(r, index[k], v.clone());
        }
    }
    mat
}

/// Unique solution of the `J_n` constraints with `E_{-i}^m` normalised to 1.
/// A solution space of dimension other than one is reported as an anomaly.
pub fn solve_singular(i: u32, m: u32) -> Result<SingularCoefficients> {
    let keys = singular_keys(i, m);
    let mat = constraint_matrix(&keys, &build_constraints(i, m)?);
    let kernel = linalg::kernel(&mat);
    if kernel.cols() != 1 {
        return Err(Error::KernelDimension {
            expected: 1,
            found: kernel.cols(),
            context: format!("singular-vector constraints for i = {i}, m = {m}"),
        });
    }
    let top = keys.iter().position(|k| *k == normalization_key(i, m)).expect("normalisation key present");
    let scale = kernel.get(top, 0).clone();
    if scale.is_zero() {
        return Err(Error::KernelDimension {
            expected: 1,
            found: 0,
            context: format!("solution for i = {i}, m = {m} vanishes on E_(-{i})^{m}"),
        });
    }
    let coeffs = keys.into_iter().enumerate().map(|(p, k)| (k, kernel.get(p, 0) / &scale)).filter(|(_, c)| !c.is_zero()).collect();
    Ok(SingularCoefficients { i, m, coeffs })
}

fn factorial(n: usize) -> Q {
    (1..=n as i64).fold(int(1), |acc, f| acc * int(f))
}

/// Explicit `m = 1` coefficients: `C(nu, r) = (-1)^{l(nu)} / prod_v (k_v! v^{k_v})`
/// where `nu` has `k_v` parts equal to `v`.
pub fn closed_form(i: u32) -> Result<SingularCoefficients> {
    check_sizes(i, 1)?;
    let coeffs = singular_keys(i, 1)
        .into_iter()
        .map(|key| {
            let nu = key.nu();
            let denom = nu.runs().iter().fold(int(1), |acc, &(v, k)| acc * factorial(k) * int(v as i64).pow(k as i32));
            let sign = if nu.len() % 2 == 0 { int(1) } else { int(-1) };
            (key, sign / denom)
        })
        .collect();
    Ok(SingularCoefficients { i, m: 1, coeffs })
}

impl SingularCoefficients {
    /// `U` with `chi = U |i, j>`.
    pub fn element(&self) -> UEAElement<Q> {
        let mut u = UEAElement::zero();
        for (k, c) in &self.coeffs {
            u.add_term(k.word(), c);
        }
        u
    }

    fn from_element(i: u32, m: u32, u: &UEAElement<Q>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (w, c) in u.terms() {
            let mut nu = Vec::new();
            let mut mu = Vec::new();
            for x in w.modes() {
                let part = u32::try_from(-x.index)
                    .ok()
                    .filter(|&p| p > 0)
                    .ok_or_else(|| Error::Inapplicable(format!("{x} is not a negative mode")))?;
                match x.gen {
                    Gen::I => nu.push(part),
                    Gen::E => mu.push(part),
                    _ => return Err(Error::Inapplicable(format!("{x} cannot occur in a singular vector"))),
                }
            }
            let key = SingularKey::from_monomial(&Partition::new(nu)?, &Partition::new(mu)?);
            coeffs.insert(key, c.clone());
        }
        let top = coeffs.get(&normalization_key(i, m)).cloned().ok_or_else(|| Error::KernelDimension {
            expected: 1,
            found: 0,
            context: format!("no E_(-{i})^{m} term"),
        })?;
        for c in coeffs.values_mut() {
            *c = &*c / &top;
        }
        Ok(SingularCoefficients { i, m, coeffs })
    }

    /// Signed sum of words, e.g. `E(-2) - I(-1) E(-1)`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (n, (k, c)) in self.coeffs.iter().enumerate() {
            let neg = c < &int(0);
            let mag = if neg { -c } else { c.clone() };
            if n == 0 {
                s.push_str(if neg { "-" } else { "" });
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if mag != int(1) {
                s.push_str(&fmt_q(&mag));
                s.push(' ');
            }
            s.push_str(&k.to_string());
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> =
            self.coeffs.iter().map(|(k, c)| serde_json::json!({ "lambda": k.lambda, "mu": k.mu, "coeff": fmt_q(c) })).collect();
        serde_json::Value::Array(rows)
    }
}

/// Normal-ordered `U^m` for the `m = 1` solution `U`, renormalised.
pub fn power(c: &SingularCoefficients, m: u32) -> Result<SingularCoefficients> {
    if c.m != 1 || m == 0 {
        return Err(Error::InvalidParams("powers are taken of an m = 1 singular vector with exponent >= 1".into()));
    }
    let u = c.element();
    let mut acc = u.clone();
    for _ in 1..m {
        acc = normal_order(&acc.mul_raw(&u), &int(1));
    }
    let acc = normal_order(&acc, &int(1));
    SingularCoefficients::from_element(c.i, m, &acc)
}

/// Outcome of one annihilation or eigenvalue check.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SingularReport {
    pub i: u32,
    pub m: u32,
    pub j: String,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Acts with the coefficients on the highest-weight vector of the Verma
/// module with weight `(i, j)` at level 1 and checks annihilation by every
/// positive mode up to the grade of the vector, `E_0`, and the `J_0` and
/// `L_0` eigenvalues.
pub fn verify_singular(c: &SingularCoefficients, j: &Q) -> Result<SingularReport> {
    let (i, m) = (c.i as i64, c.m as i64);
    let grade = i * m;
    let label = AffineLabel::Verma { plus: true, i: int(i), j: j.clone() };
    let module = module_for(&label, grade, (-grade - 2, m + 2))?;
    let hw = ModuleVector::basis(BasisVector::ground(0));
    let chi = module.act_element(&c.element(), &hw)?;
    let mut checks = Vec::new();
    let mut modes = vec![Mode::e(0)];
    for n in 1..=grade {
        modes.extend([Mode::j(n), Mode::f(n), Mode::e(n), Mode::i(n)]);
    }
    for x in modes {
        let image = module.act_mode(x, &chi)?;
        checks.push(Check { name: format!("{x} annihilates"), passed: image.is_zero() });
    }
    checks.push(Check { name: "nonzero".into(), passed: !chi.is_zero() });
    let j0 = module.act_mode(Mode::j(0), &chi)?;
    checks.push(Check { name: "J(0) eigenvalue j + m".into(), passed: j0 == chi.scale(&(j + int(m))) });
    let l0 = sugawara_mode(&module, 0, &int(1), &chi)?;
    let weight = hw_conformal_weight(&int(i), j, &int(1)) + int(grade);
    checks.push(Check { name: "L(0) eigenvalue of highest weight plus i m".into(), passed: l0 == chi.scale(&weight) });
    let passed = checks.iter().all(|c| c.passed);
    Ok(SingularReport { i: c.i, m: c.m, j: fmt_q(j), checks, passed })
}

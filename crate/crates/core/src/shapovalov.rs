//! Contravariant (Shapovalov) forms on induced modules, normalised to 1 on a
//! cyclic ground state, and the data derived from their ranks: irreducible
//! weight dimensions, string functions and the `i = 0` triangularity test.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::affinepbw::{relaxed_conformal_weight, Mode};
use crate::affmodules::{module_for, Actor, AffineLabel, BasisVector, InducedModule, WeightTable};
use crate::error::{Error, Result};
use crate::exactalg::{fmt_q, int, ExactMatrix, Poly, Ring, Q};
use crate::h4finite::{DenseNormalization, FiniteWeightModule, Gen, ModuleKind};
use crate::linalg;

/// Gram matrix of one weight space.
#[derive(Clone, Debug)]
pub struct ShapovalovMatrix<T> {
    pub m: i64,
    pub n: i64,
    /// Bottom offset of the cyclic ground state with norm 1.
    pub generator: i64,
    pub basis: Vec<BasisVector>,
    pub matrix: ExactMatrix<T>,
}

struct Cell<T> {
    index: HashMap<BasisVector, usize>,
    gram: ExactMatrix<T>,
}

/// Computes Gram matrices for one module and one generator, sharing lower
/// cells and mode actions between calls.
pub struct GramBuilder<'m, T> {
    module: &'m InducedModule<T>,
    generator: i64,
    norms: BTreeMap<i64, T>,
    actor: Actor<'m, T>,
    cells: HashMap<(i64, i64), Arc<Cell<T>>>,
}

impl<'m, T: Ring> GramBuilder<'m, T> {
    pub fn new(module: &'m InducedModule<T>, generator: i64) -> Result<Self> {
        let bottom = module.bottom();
        if !bottom.supports(generator) {
            return Err(Error::InvalidGenerator(format!("offset {generator} carries no ground state")));
        }
        if !bottom.kind().is_dense() && generator != 0 {
            return Err(Error::InvalidGenerator("highest- and lowest-weight modules are generated by offset 0".into()));
        }
        let mut norms = BTreeMap::new();
        norms.insert(generator, T::one());
        Ok(GramBuilder { module, generator, norms, actor: module.actor(), cells: HashMap::new() })
    }

    pub fn generator(&self) -> i64 {
        self.generator
    }

    /// Norm of the ground state at offset `s`, from `e(s) N(s+1) = f(s+1) N(s)`.
    pub fn ground_norm(&mut self, s: i64) -> Result<T> {
        if let Some(v) = self.norms.get(&s) {
            return Ok(v.clone());
        }
        let module = self.module;
        let bottom = module.bottom();
        let generator = self.generator;
        let fail =
            |t: i64| Error::InvalidGenerator(format!("ground state at offset {t} is not reached from the generator at offset {generator}"));
        if s < self.generator {
            let above = self.ground_norm(s + 1)?;
            let v = bottom.e(s).mul(&above).try_div(&bottom.f(s + 1)).ok_or_else(|| fail(s))?;
            self.norms.insert(s, v.clone());
            Ok(v)
        } else {
            let below = self.ground_norm(s - 1)?;
            let v = bottom.f(s).mul(&below).try_div(&bottom.e(s - 1)).ok_or_else(|| fail(s))?;
            self.norms.insert(s, v.clone());
            Ok(v)
        }
    }

    fn cell(&mut self, m: i64, n: i64) -> Result<Arc<Cell<T>>> {
        if let Some(c) = self.cells.get(&(m, n)) {
            return Ok(c.clone());
        }
        let basis = self.module.basis_unchecked(m, n);
        let index: HashMap<BasisVector, usize> = basis.iter().cloned().enumerate().map(|(p, b)| (b, p)).collect();
        let dim = basis.len();
        let mut gram = ExactMatrix::zeros(dim, dim);
        if n == 0 {
            if dim == 1 {
                gram.set(0, 0, self.ground_norm(m)?);
            }
        } else {
            // <y u', v> = <u', y^dagger v> with y the leftmost mode of u.
            let mut by_first: BTreeMap<Mode, Vec<usize>> = BTreeMap::new();
            for (p, b) in basis.iter().enumerate() {
                by_first.entry(b.word.first().expect("positive grade")).or_default().push(p);
            }
            for (y, rows) in by_first {
                let lower = self.cell(m - y.charge(), n - y.grade())?;
                let dagger = y.adjoint();
                let mut images: Vec<Vec<(usize, T)>> = Vec::with_capacity(dim);
                for v in &basis {
                    let img = self.actor.act_basis(dagger, v)?;
                    let mut terms = Vec::with_capacity(img.len());
                    for (b, c) in img {
                        let l =
                            *lower.index.get(&b).ok_or_else(|| Error::WindowOverflow(format!("{dagger} on {v} left the lower cell")))?;
                        terms.push((l, c));
                    }
                    images.push(terms);
                }
                for p in rows {
                    let rest = BasisVector { word: basis[p].word.rest(), offset: basis[p].offset };
                    let r = lower.index[&rest];
                    let lower_row = lower.gram.row(r);
                    for (col, terms) in images.iter().enumerate() {
                        let mut acc = T::zero();
                        for (l, c) in terms {
                            acc.add_mul(c, &lower_row[*l]);
                        }
                        gram.set(p, col, acc);
                    }
                }
            }
        }
        let cell = Arc::new(Cell { index, gram });
        self.cells.insert((m, n), cell.clone());
        Ok(cell)
    }

    pub fn gram(&mut self, m: i64, n: i64) -> Result<ShapovalovMatrix<T>> {
        if !self.module.in_window(m, n) {
            return Err(Error::OutOfWindow { m, n });
        }
        let cell = self.cell(m, n)?;
        Ok(ShapovalovMatrix { m, n, generator: self.generator, basis: self.module.basis_unchecked(m, n), matrix: cell.gram.clone() })
    }
}

/// Default cyclic generator for cell `(m, n)`: offset 0 for highest- and
/// lowest-weight bottoms. Dense bottoms use the ground state `n` steps above
/// the cell, kept strictly above `h/i` for the kind with a highest-weight
/// submodule and at or below it for its conjugate.
pub fn default_generator<T: Ring>(module: &InducedModule<T>, m: i64, n: i64, critical: Option<i64>) -> i64 {
    let bottom = module.bottom();
    if !bottom.kind().is_dense() {
        return 0;
    }
    let base = m + n;
    match (bottom.kind(), critical) {
        (ModuleKind::DensePlus, Some(c)) => base.max(c + 1),
        (ModuleKind::DenseMinus, Some(c)) => (m - n).min(c),
        _ => base,
    }
}

/// Offset `s` with `j + s = h/i` for a numeric bottom in the reducibility class.
pub fn critical_offset(module: &InducedModule<Q>) -> Option<i64> {
    let b = module.bottom();
    if b.i().is_zero() {
        return None;
    }
    let t = b.h() / b.i() - b.j();
    t.is_integer().then(|| crate::exactalg::to_i64(&t).expect("small offset"))
}

fn check_generator(module: &InducedModule<Q>, g: i64) -> Result<()> {
    let Some(c) = critical_offset(module) else {
        return Ok(());
    };
    let bound = fmt_q(&(module.bottom().h() / module.bottom().i()));
    match module.bottom().kind() {
        ModuleKind::DensePlus if g <= c => Err(Error::InvalidGenerator(format!("the generator J-eigenvalue must exceed h/i = {bound}"))),
        ModuleKind::DenseMinus if g > c => {
            Err(Error::InvalidGenerator(format!("the generator J-eigenvalue must not exceed h/i = {bound}")))
        }
        _ => Ok(()),
    }
}

/// Shapovalov matrix of a numeric cell with an optional explicit generator.
pub fn shap_matrix(module: &InducedModule<Q>, m: i64, n: i64, generator: Option<i64>) -> Result<ShapovalovMatrix<Q>> {
    let critical = critical_offset(module);
    let g = generator.unwrap_or_else(|| default_generator(module, m, n, critical));
    check_generator(module, g)?;
    GramBuilder::new(module, g)?.gram(m, n)
}

/// Rank data of one cell.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CellRank {
    pub m: i64,
    pub n: i64,
    /// Dimension of the cell in the induced module.
    pub dim_verma: usize,
    pub rank: usize,
    pub kernel_dim: usize,
}

/// Ranks of the Gram matrices over a rectangle of cells. `generator_shift`
/// moves every default generator by the given number of steps, which must
/// keep it cyclic.
pub fn cell_ranks(module: &InducedModule<Q>, ms: (i64, i64), ns: (i64, i64), generator_shift: i64) -> Result<Vec<CellRank>> {
    let critical = critical_offset(module);
    let mut groups: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
    for n in ns.0..=ns.1 {
        for m in ms.0..=ms.1 {
            let g = default_generator(module, m, n, critical) + generator_shift;
            groups.entry(g).or_default().push((m, n));
        }
    }
    let groups: Vec<(i64, Vec<(i64, i64)>)> = groups.into_iter().collect();
    let per_group: Vec<Result<Vec<CellRank>>> = groups
        .par_iter()
        .map(|(g, cells)| {
            check_generator(module, *g)?;
            let mut builder = GramBuilder::new(module, *g)?;
            cells
                .iter()
                .map(|&(m, n)| {
                    let gram = builder.gram(m, n)?;
                    let dim = gram.basis.len();
                    let rank = linalg::rank(&gram.matrix);
                    Ok(CellRank { m, n, dim_verma: dim, rank, kernel_dim: dim - rank })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for r in per_group {
        out.extend(r?);
    }
    out.sort_by_key(|c| (c.n, c.m));
    Ok(out)
}

fn truncation_for(ms: (i64, i64), ns: (i64, i64)) -> (i64, (i64, i64)) {
    (ns.1, (ms.0 - ns.1 - 1, ms.1 + ns.1 + 1))
}

/// Dimensions of the irreducible quotient of the module a label is built
/// from: the rank of the form on each cell.
pub fn irreducible_dims(label: &AffineLabel, ms: (i64, i64), ns: (i64, i64)) -> Result<WeightTable> {
    let (grade, window) = truncation_for(ms, ns);
    let module = module_for(label, grade, window)?;
    let ranks = cell_ranks(&module, ms, ns, 0)?;
    Ok(rank_table(label, &ranks))
}

/// Kernel dimensions of the form, labelled like the module.
pub fn kernel_dims(label: &AffineLabel, ms: (i64, i64), ns: (i64, i64)) -> Result<WeightTable> {
    let (grade, window) = truncation_for(ms, ns);
    let module = module_for(label, grade, window)?;
    let ranks = cell_ranks(&module, ms, ns, 0)?;
    let (i, j0, delta0) = label.anchor();
    Ok(WeightTable::new(i, j0, delta0, ranks.iter().map(|c| ((c.m, c.n), c.kernel_dim as u64)).collect()))
}

fn rank_table(label: &AffineLabel, ranks: &[CellRank]) -> WeightTable {
    let (i, j0, delta0) = label.anchor();
    WeightTable::new(i, j0, delta0, ranks.iter().map(|c| ((c.m, c.n), c.rank as u64)).collect())
}

/// Gram matrix of the dense family with `j` formal, normalised with the
/// lowering maps equal to one so that every entry is a polynomial in `j`.
/// The generator sits `n` steps above the cell.
pub fn symbolic_shap_matrix(i: &Q, h: &Q, m: i64, n: i64) -> Result<ShapovalovMatrix<Poly>> {
    let pad = n + 2;
    let window = (m - n - 1, m + n + 1);
    let bottom = FiniteWeightModule::from_parts(
        ModuleKind::DenseIrr,
        i.clone(),
        Poly::var(),
        h.clone(),
        DenseNormalization::LowerUnit,
        (window.0 - pad, window.1 + pad),
    );
    let module = InducedModule::new(bottom, int(1), n, window)?;
    GramBuilder::new(&module, m + n)?.gram(m, n)
}

/// Leading exponent and coefficients of a string function.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct StringFunction {
    #[serde(with = "crate::exactalg::serde_q")]
    pub delta0: Q,
    pub coeffs: Vec<u64>,
}

/// String function of the irreducible dense family `(i, h)` obtained as the
/// limit of string functions of the lowest-weight irreducible with
/// `J`-eigenvalue `h/i + 1`. Coefficients up to `q^qmax` are read at charge
/// `h/i + qmax + 1` and must agree with a second reading one step further.
pub fn string_function(i: &Q, h: &Q, qmax: i64) -> Result<StringFunction> {
    if i.is_zero() {
        return Err(Error::InvalidParams("the limit procedure needs i != 0".into()));
    }
    let label = AffineLabel::Irr { plus: false, i: i.clone(), j: h / i + int(1) };
    let window = (0, qmax + 2);
    let module = module_for(&label, qmax, window)?;
    let read = |m: i64| -> Result<Vec<u64>> { Ok(cell_ranks(&module, (m, m), (0, qmax), 0)?.iter().map(|c| c.rank as u64).collect()) };
    let first = read(qmax)?;
    let second = read(qmax + 1)?;
    if first != second {
        return Err(Error::KernelDimension {
            expected: first.iter().sum::<u64>() as usize,
            found: second.iter().sum::<u64>() as usize,
            context: format!("string function not yet stable at charge offset {}: {first:?} vs {second:?}", qmax + 1),
        });
    }
    Ok(StringFunction { delta0: relaxed_conformal_weight(i, h, &int(1)), coeffs: first })
}

/// One cell of the triangularity test for `i = 0`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct TriangularCell {
    pub m: i64,
    pub n: i64,
    pub dim: usize,
    pub upper_triangular: bool,
    pub constant_diagonal: bool,
    pub full_rank: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct TriangularReport {
    pub j: String,
    pub h: String,
    pub cells: Vec<TriangularCell>,
    pub passed: bool,
}

/// Matrix of `F_0 E_0` on the cells of the induced dense module with
/// `i = 0`, with basis words ordered by increasing number of `J` modes and
/// then decreasing number of `I` modes. Each cell must be upper triangular
/// with every diagonal entry `h`, and the form must be nondegenerate.
pub fn zero_charge_check(j: &Q, h: &Q, ms: (i64, i64), max_n: i64) -> Result<TriangularReport> {
    if h.is_zero() {
        return Err(Error::InvalidParams("h = 0 gives a reducible induced module; h != 0 is required".into()));
    }
    let label = AffineLabel::Relaxed { i: int(0), j: j.clone(), h: h.clone() };
    let (grade, window) = truncation_for(ms, (0, max_n));
    let module = module_for(&label, grade, window)?;
    let mut actor = module.actor();
    let ranks = cell_ranks(&module, ms, (0, max_n), 0)?;
    let mut cells = Vec::new();
    for c in &ranks {
        let (m, n) = (c.m, c.n);
        let basis = module.basis_unchecked(m, n);
        let raise = module.mode_matrix(&mut actor, Mode::e(0), m, n)?;
        let lower = module.mode_matrix(&mut actor, Mode::f(0), m + 1, n)?;
        let op = lower.mul(&raise);
        let mut order: Vec<usize> = (0..basis.len()).collect();
        order.sort_by_key(|&p| (basis[p].word.count(Gen::J), std::cmp::Reverse(basis[p].word.count(Gen::I))));
        let op = op.select(&order, &order);
        let upper_triangular = op.is_upper_triangular();
        let constant_diagonal = op.diagonal().iter().all(|d| d == h);
        let full_rank = c.rank == c.dim_verma;
        cells.push(TriangularCell { m, n, dim: basis.len(), upper_triangular, constant_diagonal, full_rank });
    }
    let passed = cells.iter().all(|c| c.upper_triangular && c.constant_diagonal && c.full_rank);
    Ok(TriangularReport { j: fmt_q(j), h: fmt_q(h), cells, passed })
}

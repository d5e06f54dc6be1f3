//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL line;
//! the process exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use h4_core::affinepbw::{
    adjoint, hw_conformal_weight, lw_conformal_weight, mode_bracket, normal_order, product, relaxed_conformal_weight, sugawara_mode, Mode,
    UEAElement, Word,
};
use h4_core::affmodules::{module_for, twist_label, AffineLabel, BasisVector, InducedModule, ModuleVector};
use h4_core::characters::{enumerate_table, expand, twist_table};
use h4_core::exactalg::{fmt_q, int, rat, Q};
use h4_core::h4finite::{bracket, build_module, kappa, Automorphism, AutomorphismSpec, BilinearParams, Gen, H4Element, ModuleKind};
use h4_core::shapovalov::irreducible_dims;
use h4_core::singular::{closed_form, solve_singular};
use h4_core::verify::{run_suite, singular_cells, SuiteConfig};
use h4_core::Result;

type Failures = Vec<String>;

const MS: (i64, i64) = (-5, 5);
const NS: (i64, i64) = (0, 5);

fn note(failures: &mut Failures, what: impl Into<String>, mismatches: Vec<String>) {
    if !mismatches.is_empty() {
        let shown: Vec<&str> = mismatches.iter().take(3).map(String::as_str).collect();
        failures.push(format!("{}: {} mismatches, e.g. {}", what.into(), mismatches.len(), shown.join("; ")));
    }
}

fn expect(failures: &mut Failures, ok: bool, what: impl Into<String>) {
    if !ok {
        failures.push(what.into());
    }
}

fn suite(failures: &mut Failures, name: &str, cfg: SuiteConfig) -> Result<()> {
    let report = run_suite(name, &cfg)?;
    for a in report.assertions.iter().filter(|a| !a.passed) {
        failures.push(format!("{name}: {} {}", a.name, a.detail.clone().unwrap_or_default()));
    }
    Ok(())
}

fn singular_reproduction() -> Result<Failures> {
    let mut f = Vec::new();
    for i in 1..=6 {
        expect(&mut f, solve_singular(i, 1)? == closed_form(i)?, format!("i = {i}: solved vector differs from the closed form"));
    }
    let found: Vec<Q> = solve_singular(4, 1)?.coeffs.into_values().collect();
    let expected = vec![int(1), int(-1), rat(-1, 2), rat(1, 2), rat(-1, 3), rat(1, 2), rat(-1, 6)];
    expect(&mut f, found == expected, format!("i = 4 coefficients {:?}", found.iter().map(fmt_q).collect::<Vec<_>>()));
    Ok(f)
}

fn verma_kernels() -> Result<Failures> {
    let mut f = Vec::new();
    let j = rat(1, 3);
    for i in 1..=3i64 {
        let cells = singular_cells(&int(i), &j, MS, NS)?;
        let expected: Vec<(i64, i64)> = (0..=NS.1 / i).map(|m| (m, i * m)).collect();
        expect(&mut f, cells == expected, format!("i = {i}: singular cells {cells:?}"));
    }
    for i in [rat(1, 2), rat(3, 7), rat(5, 2), rat(-2, 3)] {
        let cells = singular_cells(&i, &j, MS, NS)?;
        expect(&mut f, cells == [(0, 0)], format!("i = {}: singular cells beyond the top {cells:?}", fmt_q(&i)));
    }
    // The conjugate of V+(1, j) has I_0-eigenvalue -1 and no E_0-singular vectors at all.
    let conj = AutomorphismSpec::single(Automorphism::Conj)?;
    let mirror = twist_label(&conj, &AffineLabel::Verma { plus: true, i: int(1), j: j.clone() })?;
    expect(&mut f, mirror == AffineLabel::Verma { plus: false, i: int(-1), j: -&j }, format!("conjugate label {mirror}"));
    let module = module_for(&mirror, NS.1, (MS.0 - 1, MS.1 + 1))?;
    let nonzero: Vec<(i64, i64)> = module.kernel_dims(MS, NS, Some(Gen::E))?.into_iter().filter(|&(_, d)| d > 0).map(|(c, _)| c).collect();
    expect(&mut f, nonzero.is_empty(), format!("{mirror}: kernel at {nonzero:?}"));
    // V+ with i = -1 itself carries singular vectors at (-m, m).
    let cells = singular_cells(&int(-1), &j, MS, NS)?;
    let expected: Vec<(i64, i64)> = (0..=NS.1).map(|n| (-n, n)).collect();
    expect(&mut f, cells == expected, format!("i = -1: singular cells {cells:?}"));
    Ok(f)
}

fn triple_pipeline() -> Result<Failures> {
    let mut f = Vec::new();
    let (j, h) = (rat(1, 3), rat(1, 2));
    // Rank tables give the irreducible quotient, so they only join in for irreducible labels
    // or for labels that name the quotient.
    let labels = [
        (AffineLabel::Verma { plus: true, i: rat(3, 7), j: rat(1, 5) }, true),
        (AffineLabel::Verma { plus: false, i: rat(3, 7), j: rat(1, 5) }, true),
        (AffineLabel::Verma { plus: true, i: int(2), j: j.clone() }, false),
        (AffineLabel::Verma { plus: false, i: int(2), j: j.clone() }, false),
        (AffineLabel::Irr { plus: true, i: int(1), j: j.clone() }, true),
        (AffineLabel::Irr { plus: false, i: int(1), j: j.clone() }, true),
        (AffineLabel::Irr { plus: true, i: int(2), j: j.clone() }, true),
        (AffineLabel::Irr { plus: false, i: int(2), j: j.clone() }, true),
        (AffineLabel::Relaxed { i: rat(1, 2), j: j.clone(), h: rat(1, 5) }, true),
        (AffineLabel::Relaxed { i: int(1), j: j.clone(), h: h.clone() }, false),
        (AffineLabel::Quotient { i: int(1), j: j.clone(), h: h.clone() }, true),
        (AffineLabel::Quotient { i: int(2), j: j.clone(), h: h.clone() }, true),
        (AffineLabel::Vacuum { j: j.clone() }, true),
    ];
    for (label, ranked) in labels {
        let closed = expand(&label, MS, NS)?;
        let counted = enumerate_table(&label, MS, NS)?;
        note(&mut f, format!("{label}: formula vs enumeration"), closed.mismatches(&counted, MS, NS));
        if ranked {
            note(&mut f, format!("{label}: formula vs form rank"), closed.mismatches(&irreducible_dims(&label, MS, NS)?, MS, NS));
        }
    }
    Ok(f)
}

fn relaxed_quotients() -> Result<Failures> {
    let mut f = Vec::new();
    suite(&mut f, "thm-7.1", SuiteConfig { grade: Some(5), ..Default::default() })?;
    // Charge independence of the formula away from the narrow window used above.
    for i in [1, 2] {
        let e = expand(&AffineLabel::Quotient { i: int(i), j: rat(1, 3), h: rat(1, 2) }, MS, NS)?;
        expect(&mut f, e.z_uniform, format!("E({i}) table depends on the charge"));
    }
    Ok(f)
}

fn symbolic_ranks() -> Result<Failures> {
    let mut f = Vec::new();
    suite(&mut f, "lemma-7.2", SuiteConfig { grade: Some(3), ..Default::default() })?;
    Ok(f)
}

fn zero_charge() -> Result<Failures> {
    let mut f = Vec::new();
    for (j, h) in [(rat(1, 5), int(2)), (rat(-2, 3), rat(1, 2)), (rat(3, 7), int(-5))] {
        suite(&mut f, "appendix-b", SuiteConfig { grade: Some(4), j: Some(j), h: Some(h), ..Default::default() })?;
    }
    Ok(f)
}

fn twisted_tables() -> Result<Failures> {
    let mut f = Vec::new();
    let j = rat(1, 3);
    let wide = (MS.0 - 2, MS.1 + 2);
    let flow = |l: i64| AutomorphismSpec::single(Automorphism::SpectralFlow(l));
    let vacuum = AffineLabel::Vacuum { j: j.clone() };
    let irr = AffineLabel::Irr { plus: true, i: int(1), j: j.clone() };
    // Flow shifts grades by the charge, so the source needs negative grades too.
    let source = expand(&vacuum, wide, (NS.0 - MS.1 - 2, NS.1 - MS.0 + 2))?;
    let flowed = twist_table(&flow(1)?, &source)?;
    note(&mut f, "sflow(1) vacuum vs enumerated L+(1)", flowed.aligned_mismatches(&enumerate_table(&irr, MS, NS)?, MS, NS));
    note(&mut f, "sflow(1) vacuum vs formula L+(1)", flowed.aligned_mismatches(&expand(&irr, MS, NS)?, MS, NS));
    let back = twist_table(&flow(-1)?, &expand(&irr, wide, (NS.0 - MS.1 - 2, NS.1 - MS.0 + 2))?)?;
    note(&mut f, "sflow(-1) L+(1) vs vacuum", back.aligned_mismatches(&enumerate_table(&vacuum, MS, NS)?, MS, NS));

    let conj = AutomorphismSpec::single(Automorphism::Conj)?;
    let conj_irr = twist_table(&conj, &enumerate_table(&irr, wide, NS)?)?;
    let target = AffineLabel::Irr { plus: false, i: int(-1), j: -&j };
    note(&mut f, format!("conj L+(1) vs {target}"), conj_irr.aligned_mismatches(&expand(&target, MS, NS)?, MS, NS));
    let conj_vac = twist_table(&conj, &enumerate_table(&vacuum, wide, NS)?)?;
    note(&mut f, "conj vacuum", conj_vac.aligned_mismatches(&enumerate_table(&AffineLabel::Vacuum { j: -&j }, MS, NS)?, MS, NS));

    let beta = rat(1, 2);
    let shift = AutomorphismSpec::single(Automorphism::AffineShift(beta.clone()))?;
    let shifted = twist_table(&shift, &enumerate_table(&vacuum, wide, NS)?)?;
    note(&mut f, "shift vacuum", shifted.aligned_mismatches(&enumerate_table(&AffineLabel::Vacuum { j: &j + &beta }, MS, NS)?, MS, NS));
    let shifted = twist_table(&shift, &enumerate_table(&irr, wide, NS)?)?;
    let target = AffineLabel::Irr { plus: true, i: int(1), j: &j + &beta };
    note(&mut f, "shift L+(1)", shifted.aligned_mismatches(&enumerate_table(&target, MS, NS)?, MS, NS));
    Ok(f)
}

const GENS: [Gen; 4] = [Gen::F, Gen::E, Gen::J, Gen::I];

fn random_q(rng: &mut StdRng) -> Q {
    rat(rng.gen_range(-9..=9), rng.gen_range(1..=7))
}

fn random_nonzero_q(rng: &mut StdRng) -> Q {
    loop {
        let q = random_q(rng);
        if q != int(0) {
            return q;
        }
    }
}

fn random_element(rng: &mut StdRng) -> H4Element {
    GENS.iter().fold(H4Element::zero(), |acc, &g| acc.add(&H4Element::basis(g).scale(&random_q(rng))))
}

fn random_word(rng: &mut StdRng) -> Vec<Mode> {
    loop {
        let len = rng.gen_range(1..=5);
        let modes: Vec<Mode> = (0..len).map(|_| Mode::new(GENS[rng.gen_range(0..4)], rng.gen_range(-3..=3))).collect();
        if modes.iter().map(|m| m.grade()).sum::<i64>().abs() <= 6 {
            return modes;
        }
    }
}

fn mode_bracket_identities(f: &mut Failures, rng: &mut StdRng) {
    for _ in 0..50 {
        let (x, y, z) = (random_element(rng), random_element(rng), random_element(rng));
        let jacobi = bracket(&x, &bracket(&y, &z)).add(&bracket(&y, &bracket(&z, &x))).add(&bracket(&z, &bracket(&x, &y)));
        expect(f, jacobi.is_zero(), format!("finite Jacobi fails at {x}, {y}, {z}"));
        let p = BilinearParams::new(random_nonzero_q(rng), random_q(rng)).unwrap();
        expect(f, kappa(&bracket(&x, &y), &z, &p) == kappa(&x, &bracket(&y, &z), &p), format!("form not invariant at {x}, {y}, {z}"));
    }
    let k = rat(5, 7);
    let comm = |a: &UEAElement<Q>, b: &UEAElement<Q>| product(a, b, &k).sub(&product(b, a, &k));
    let modes: Vec<Mode> = GENS.iter().flat_map(|&g| (-2..=2).map(move |r| Mode::new(g, r))).collect();
    for &x in &modes {
        for &y in &modes {
            let (ux, uy) = (UEAElement::mode(x), UEAElement::mode(y));
            expect(f, comm(&ux, &uy) == mode_bracket(x, y, &k), format!("commutator of {x} and {y}"));
            for &z in &modes {
                let uz = UEAElement::mode(z);
                let total = comm(&ux, &comm(&uy, &uz)).add(&comm(&uy, &comm(&uz, &ux))).add(&comm(&uz, &comm(&ux, &uy)));
                expect(f, total.is_zero(), format!("affine Jacobi fails at {x}, {y}, {z}"));
            }
        }
    }
}

fn ordering_identities(f: &mut Failures, rng: &mut StdRng) {
    let k = rat(2, 3);
    for _ in 0..1000 {
        let modes = random_word(rng);
        let raw = UEAElement::<Q>::term(Word::from_modes(modes.clone()), int(1));
        let direct = normal_order(&raw, &k);
        let from_left = modes.iter().fold(UEAElement::one(), |acc, &x| product(&acc, &UEAElement::mode(x), &k));
        let from_right = modes.iter().rev().fold(UEAElement::one(), |acc, &x| product(&UEAElement::mode(x), &acc, &k));
        let cut = rng.gen_range(0..=modes.len());
        let split = product(
            &UEAElement::term(Word::from_modes(modes[..cut].to_vec()), int(1)),
            &UEAElement::term(Word::from_modes(modes[cut..].to_vec()), int(1)),
            &k,
        );
        let word = Word::from_modes(modes);
        expect(f, direct.is_normal_ordered(), format!("{word}: result not normal ordered"));
        expect(f, direct == from_left && direct == from_right && direct == split, format!("{word}: reduction order matters"));
        expect(f, adjoint(&adjoint(&raw)) == raw, format!("{word}: adjoint is not an involution"));
        expect(
            f,
            normal_order(&adjoint(&direct), &k) == normal_order(&adjoint(&raw), &k),
            format!("{word}: adjoint and ordering disagree"),
        );
    }
}

fn test_vectors(module: &InducedModule<Q>) -> Vec<ModuleVector<Q>> {
    let mut out = Vec::new();
    for n in 0..=1 {
        for m in -1..=1 {
            out.extend(module.weight_basis(m, n).unwrap_or_default().into_iter().map(ModuleVector::basis));
        }
    }
    out
}

fn primary_fields(f: &mut Failures) -> Result<()> {
    let modules = [
        InducedModule::new(build_module(ModuleKind::DenseIrr, rat(1, 2), rat(1, 3), rat(1, 5), (-10, 10))?, int(1), 6, (-6, 6))?,
        InducedModule::new(build_module(ModuleKind::HwVerma, rat(-4, 3), rat(2, 7), int(0), (-10, 0))?, rat(3, 2), 6, (-6, 6))?,
    ];
    for module in &modules {
        let k = module.level().clone();
        for v in test_vectors(module) {
            for n in -2..=2 {
                let lv = sugawara_mode(module, n, &k, &v)?;
                for g in GENS {
                    for m in -2..=2 {
                        let lhs = sugawara_mode(module, n, &k, &module.act_mode(Mode::new(g, m), &v)?)?
                            .sub(&module.act_mode(Mode::new(g, m), &lv)?);
                        let rhs = module.act_mode(Mode::new(g, m + n), &v)?.scale(&int(-m));
                        expect(f, lhs == rhs, format!("[L({n}), {g}({m})] on {v:?} at k = {}", fmt_q(&k)));
                    }
                }
            }
        }
    }
    Ok(())
}

fn ground_weights(f: &mut Failures, rng: &mut StdRng) -> Result<()> {
    let mut done = 0;
    while done < 10 {
        let (i, j, h, k) = (random_q(rng), random_q(rng), random_q(rng), random_nonzero_q(rng));
        let cases = [
            (ModuleKind::HwVerma, (-4, 0), hw_conformal_weight(&i, &j, &k)),
            (ModuleKind::LwVerma, (0, 4), lw_conformal_weight(&i, &j, &k)),
            (ModuleKind::DenseIrr, (-6, 6), relaxed_conformal_weight(&i, &h, &k)),
        ];
        let Ok(dense) = build_module(ModuleKind::DenseIrr, i.clone(), j.clone(), h.clone(), (-6, 6)) else {
            continue;
        };
        for (kind, window, delta) in cases {
            let bottom =
                if kind == ModuleKind::DenseIrr { dense.clone() } else { build_module(kind, i.clone(), j.clone(), h.clone(), window)? };
            let module = InducedModule::new(bottom, k.clone(), 2, (-2, 2))?;
            let ground = ModuleVector::basis(BasisVector::ground(0));
            let what = format!("{kind:?} at i = {}, j = {}, h = {}, k = {}", fmt_q(&i), fmt_q(&j), fmt_q(&h), fmt_q(&k));
            expect(f, sugawara_mode(&module, 0, &k, &ground)? == ground.scale(&delta), format!("{what}: ground state"));
            for b in module.weight_basis(0, 1)? {
                let v = ModuleVector::basis(b);
                expect(f, sugawara_mode(&module, 0, &k, &v)? == v.scale(&(&delta + int(1))), format!("{what}: grade one"));
            }
        }
        done += 1;
    }
    Ok(())
}

fn foundations() -> Result<Failures> {
    let mut f = Vec::new();
    let mut rng = StdRng::seed_from_u64(0x4e57);
    mode_bracket_identities(&mut f, &mut rng);
    ordering_identities(&mut f, &mut rng);
    primary_fields(&mut f)?;
    ground_weights(&mut f, &mut rng)?;
    Ok(f)
}

type Criterion = fn() -> Result<Failures>;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion, Duration); 8] = [
        ("singular vector reproduction", singular_reproduction, Duration::from_secs(10)),
        ("Verma kernel cells", verma_kernels, Duration::from_secs(120)),
        ("formula, enumeration and form rank agree", triple_pipeline, Duration::from_secs(300)),
        ("irreducible relaxed quotients", relaxed_quotients, Duration::from_secs(300)),
        ("symbolic against sampled ranks", symbolic_ranks, Duration::from_secs(300)),
        ("zero-charge triangularity", zero_charge, Duration::from_secs(300)),
        ("twisted tables", twisted_tables, Duration::from_secs(300)),
        ("foundations", foundations, Duration::from_secs(120)),
    ];
    let mut all = true;
    for (n, (name, run, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut failures = match run() {
            Ok(f) => f,
            Err(e) => vec![format!("error: {e}")],
        };
        let took = start.elapsed();
        if took > budget {
            failures.push(format!("took {took:.1?}, budget {budget:?}"));
        }
        let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {} {verdict} {name} ({took:.1?})", n + 1);
        for line in &failures {
            println!("    {line}");
        }
        all &= failures.is_empty();
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! `h4`: characters, singular vectors, Shapovalov ranks and verification
//! suites from the command line.
//!
//! Exit codes: 0 success, 1 internal error, 2 invalid parameters, 3 a
//! mathematical anomaly or failed verification, 4 usage errors.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use h4_core::affmodules::{module_for, AffineLabel, WeightTable};
use h4_core::characters::{enumerate_table, ClosedFormChar};
use h4_core::exactalg::{fmt_q, int, parse_q, Q};
use h4_core::shapovalov::cell_ranks;
use h4_core::singular::{closed_form, power, solve_singular, verify_singular, SingularCoefficients};
use h4_core::verify::{run_suite, SuiteConfig, SUITES};
use h4_core::Error;

#[derive(Parser)]
#[command(name = "h4", version, about = "Exact computations for the affine Nappi-Witten algebra at level 1")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weight table of a module from its character formula, or by counting states with --brute.
    Char(CharArgs),
    /// Singular vector of a highest-weight Verma module, solved and checked.
    Singular(SingularArgs),
    /// Run named verification suites ("all" runs every suite).
    Verify(VerifyArgs),
    /// Ranks of the Shapovalov form cell by cell.
    Shap(ShapArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Clone)]
struct Params {
    /// I_0-eigenvalue, as "p/q"
    #[arg(long, allow_hyphen_values = true)]
    i: Option<String>,
    /// J_0-eigenvalue or class representative
    #[arg(long, allow_hyphen_values = true)]
    j: Option<String>,
    /// Casimir eigenvalue of a dense ground layer
    #[arg(long, allow_hyphen_values = true)]
    h: Option<String>,
    /// Level; only 1 is supported
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    k: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct CharArgs {
    /// verma+, verma-, irr+, irr-, vacuum, relaxed, irr-relaxed, relaxed+, relaxed-, irr-relaxed+, irr-relaxed-, relaxed-zero
    #[arg(long)]
    family: String,
    #[command(flatten)]
    params: Params,
    /// Largest grade
    #[arg(long, default_value_t = 6)]
    qmax: i64,
    /// Charge offsets as "lo..hi"
    #[arg(long, allow_hyphen_values = true, default_value = "-6..6")]
    mwin: String,
    /// Count states of the induced module instead of expanding the formula
    #[arg(long)]
    brute: bool,
}

#[derive(Args)]
struct SingularArgs {
    #[arg(long)]
    i: u32,
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// J_0-eigenvalue of the Verma module used for the annihilation check
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    j: String,
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    k: String,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite names
    suites: Vec<String>,
    /// Further suite names
    #[arg(long = "suite")]
    suite: Vec<String>,
    #[command(flatten)]
    params: Params,
    /// Largest grade; each suite has its own default
    #[arg(long)]
    qmax: Option<i64>,
    /// Charge offsets as "lo..hi"; each suite has its own default
    #[arg(long, allow_hyphen_values = true)]
    mwin: Option<String>,
    /// Largest integral I_0-eigenvalue for sweeping suites
    #[arg(long)]
    imax: Option<u32>,
}

#[derive(Args)]
struct ShapArgs {
    #[arg(long)]
    family: String,
    #[command(flatten)]
    params: Params,
    #[arg(long, default_value_t = 6)]
    qmax: i64,
    #[arg(long, allow_hyphen_values = true, default_value = "-6..6")]
    mwin: String,
    /// Move every generator by this many steps
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    generator_shift: i64,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_)
            | Error::InvalidParams(_)
            | Error::OutOfWindow { .. }
            | Error::InsufficientWindow(_)
            | Error::InvalidGenerator(_)
            | Error::NotSubpartition { .. }
            | Error::Uncatalogued(_)
            | Error::Inapplicable(_) => 2,
            Error::KernelDimension { .. } => 3,
            Error::UnknownSuite(_) => 4,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure { code: 2, message: msg.into() }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn rational(name: &str, value: &Option<String>) -> CliResult<Q> {
    match value {
        Some(s) => Ok(parse_q(s)?),
        None => Err(invalid(format!("--{name} is required for this family"))),
    }
}

fn check_level(k: &str) -> CliResult<()> {
    let k = parse_q(k)?;
    if k == int(0) {
        return Err(invalid("the level k must be nonzero"));
    }
    if k != int(1) {
        return Err(invalid(format!("level {} requested; the module engine works at level 1 only", fmt_q(&k))));
    }
    Ok(())
}

fn parse_window(s: &str) -> CliResult<(i64, i64)> {
    let bad = || invalid(format!("expected a window \"lo..hi\", got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn family_label(family: &str, p: &Params) -> CliResult<AffineLabel> {
    let i = || rational("i", &p.i);
    let j = || rational("j", &p.j);
    let h = || rational("h", &p.h);
    Ok(match family {
        "verma+" => AffineLabel::Verma { plus: true, i: i()?, j: j()? },
        "verma-" => AffineLabel::Verma { plus: false, i: i()?, j: j()? },
        "irr+" => AffineLabel::Irr { plus: true, i: i()?, j: j()? },
        "irr-" => AffineLabel::Irr { plus: false, i: i()?, j: j()? },
        "vacuum" => AffineLabel::Vacuum { j: j()? },
        "relaxed" => AffineLabel::Relaxed { i: i()?, j: j()?, h: h()? },
        "irr-relaxed" => AffineLabel::Quotient { i: i()?, j: j()?, h: h()? },
        "relaxed+" => AffineLabel::RelaxedPm { plus: true, i: i()?, h: h()? },
        "relaxed-" => AffineLabel::RelaxedPm { plus: false, i: i()?, h: h()? },
        "irr-relaxed+" => AffineLabel::QuotientPm { plus: true, i: i()?, h: h()? },
        "irr-relaxed-" => AffineLabel::QuotientPm { plus: false, i: i()?, h: h()? },
        "relaxed-zero" => AffineLabel::RelaxedZero { j: j()? },
        other => return Err(Failure { code: 4, message: format!("unknown family {other:?}") }),
    })
}

fn render_table(t: &WeightTable, format: Format, header: serde_json::Value) -> String {
    match format {
        Format::Json => {
            let mut v = t.to_json();
            if let (Some(obj), Some(extra)) = (v.as_object_mut(), header.as_object()) {
                for (key, value) in extra {
                    obj.insert(key.clone(), value.clone());
                }
            }
            serde_json::to_string_pretty(&v).expect("serialisable")
        }
        Format::Csv => t.to_csv(),
        Format::Text => format!("{}\n{}", header["recipe"].as_str().unwrap_or(""), t.to_text()),
    }
}

fn cmd_char(a: &CharArgs) -> CliResult<String> {
    check_level(&a.params.k)?;
    if a.qmax < 0 {
        return Err(invalid("--qmax must be nonnegative"));
    }
    let ms = parse_window(&a.mwin)?;
    let label = family_label(&a.family, &a.params)?;
    let closed = ClosedFormChar::new(label.clone())?;
    let ns = (0, a.qmax);
    let (table, pipeline) =
        if a.brute { (enumerate_table(&label, ms, ns)?, "enumeration") } else { (closed.expand(ms, ns), "closed-form") };
    let header = json!({ "family": a.family, "label": label.to_string(), "recipe": closed.recipe(), "pipeline": pipeline });
    Ok(render_table(&table, a.params.format, header))
}

fn singular_rows(c: &SingularCoefficients) -> String {
    let mut s = String::from("lambda,mu,coeff\n");
    for row in c.to_json().as_array().into_iter().flatten() {
        s.push_str(&format!(
            "\"{}\",\"{}\",{}\n",
            row["lambda"].as_str().unwrap_or_default(),
            row["mu"].as_str().unwrap_or_default(),
            row["coeff"].as_str().unwrap_or_default()
        ));
    }
    s
}

fn cmd_singular(a: &SingularArgs) -> CliResult<(String, bool)> {
    check_level(&a.k)?;
    let j = parse_q(&a.j)?;
    let solved = solve_singular(a.i, a.m)?;
    let closed = power(&closed_form(a.i)?, a.m)?;
    let agrees = solved == closed;
    let report = verify_singular(&solved, &j)?;
    let ok = agrees && report.passed;
    let out = match a.format {
        Format::Json => serde_json::to_string_pretty(&json!({
            "i": a.i,
            "m": a.m,
            "coefficients": solved.to_json(),
            "rendered": solved.render(),
            "closed_form_agrees": agrees,
            "verification": report,
            "passed": ok,
        }))
        .expect("serialisable"),
        Format::Csv => singular_rows(&solved),
        Format::Text => {
            let mut s = format!("chi = ({}) |{}, {}>\n", solved.render(), a.i, fmt_q(&j));
            s.push_str(&format!("closed form agrees: {agrees}\n"));
            for c in &report.checks {
                s.push_str(&format!("{} {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name));
            }
            s
        }
    };
    Ok((out, ok))
}

fn cmd_verify(a: &VerifyArgs) -> CliResult<(String, bool)> {
    check_level(&a.params.k)?;
    let mut names: Vec<String> = a.suites.iter().chain(&a.suite).cloned().collect();
    if names.is_empty() {
        return Err(Failure { code: 4, message: format!("name a suite: {} or all", SUITES.join(", ")) });
    }
    if names.iter().any(|n| n == "all") {
        names = SUITES.iter().map(|s| s.to_string()).collect();
    }
    if let Some(bad) = names.iter().find(|n| !SUITES.contains(&n.as_str())) {
        return Err(Error::UnknownSuite(bad.clone()).into());
    }
    let parse = |v: &Option<String>| v.as_deref().map(parse_q).transpose();
    let cfg = SuiteConfig {
        grade: a.qmax,
        mwin: a.mwin.as_deref().map(parse_window).transpose()?,
        i: parse(&a.params.i)?,
        j: parse(&a.params.j)?,
        h: parse(&a.params.h)?,
        imax: a.imax,
    };
    let mut reports = Vec::new();
    for name in &names {
        reports.push(run_suite(name, &cfg)?);
    }
    let passed = reports.iter().all(|r| r.passed);
    let failed: usize = reports.iter().map(|r| r.failed).sum();
    let total: usize = reports.iter().map(|r| r.total).sum();
    let out = match a.params.format {
        Format::Json => serde_json::to_string_pretty(&json!({ "passed": passed, "total": total, "failed": failed, "suites": reports }))
            .expect("serialisable"),
        Format::Csv => {
            let mut s = String::from("suite,assertion,passed\n");
            for r in &reports {
                for x in &r.assertions {
                    s.push_str(&format!("{},\"{}\",{}\n", r.suite, x.name.replace('"', "'"), x.passed));
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                s.push_str(&format!(
                    "{} {} ({}/{} assertions passed)\n",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.suite,
                    r.total - r.failed,
                    r.total
                ));
                for x in r.assertions.iter().filter(|x| !x.passed) {
                    s.push_str(&format!("  FAIL {}: {}\n", x.name, x.detail.as_deref().unwrap_or("")));
                }
            }
            s
        }
    };
    Ok((out, passed))
}

fn cmd_shap(a: &ShapArgs) -> CliResult<String> {
    check_level(&a.params.k)?;
    if a.qmax < 0 {
        return Err(invalid("--qmax must be nonnegative"));
    }
    let ms = parse_window(&a.mwin)?;
    let label = family_label(&a.family, &a.params)?;
    let module = module_for(&label, a.qmax, (ms.0 - a.qmax - 1, ms.1 + a.qmax + 1))?;
    let cells = cell_ranks(&module, ms, (0, a.qmax), a.generator_shift)?;
    Ok(match a.params.format {
        Format::Json => serde_json::to_string_pretty(&json!({ "label": label.to_string(), "cells": cells })).expect("serialisable"),
        Format::Csv => {
            let mut s = String::from("m,n,dim_verma,rank,kernel_dim\n");
            for c in &cells {
                s.push_str(&format!("{},{},{},{},{}\n", c.m, c.n, c.dim_verma, c.rank, c.kernel_dim));
            }
            s
        }
        Format::Text => {
            let mut s = format!("{label}\n{:>4} {:>4} {:>6} {:>6} {:>6}\n", "m", "n", "dim", "rank", "kernel");
            for c in &cells {
                s.push_str(&format!("{:>4} {:>4} {:>6} {:>6} {:>6}\n", c.m, c.n, c.dim_verma, c.rank, c.kernel_dim));
            }
            s
        }
    })
}

fn run(cli: &Cli) -> CliResult<(String, bool)> {
    match &cli.command {
        Command::Char(a) => cmd_char(a).map(|s| (s, true)),
        Command::Singular(a) => cmd_singular(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Shap(a) => cmd_shap(a).map(|s| (s, true)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((out, ok)) => {
            // A closed pipe downstream is not an error of ours.
            let _ = writeln!(std::io::stdout(), "{}", out.trim_end());
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("ANOMALY: a check contradicting a theorem failed; see the report above");
                ExitCode::from(3)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

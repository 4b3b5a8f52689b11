//! `wn2`: batch driver for OPE tables, commutant checks, relations, the
//! Zhu reduction and module classification.
//!
//! Exit status is 0 when every check passes, 1 when a check fails and 2 on
//! usage or input errors. `WN2_THREADS` sets the worker thread count.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use wn2_core::commutant::{self, CurrentSet};
use wn2_core::fixtures;
use wn2_core::fock;
use wn2_core::models::{build_model, ModelContext, ModelKind};
use wn2_core::ope;
use wn2_core::syntax::{self, render};
use wn2_core::zhu::{self, family_name, ZhuGrading};
use wn2_core::{Rational, Symbol};

#[derive(Parser)]
#[command(name = "wn2", version, about = "Exact free-field vertex algebra engine")]
struct Cli {
    /// Emit one JSON document on standard output instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Singular OPE of two expressions in the beta-gamma-b-c system of rank n.
    Ope {
        #[arg(long)]
        n: u8,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Also write the table as JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All generator OPE tables, compared against the golden tables.
    Tables {
        #[arg(long)]
        n: u8,
    },
    /// Commutant membership of the generators and the Casimir fixtures.
    Verify {
        #[arg(long)]
        n: u8,
        /// Also check against the odd and even psl(n|n) currents.
        #[arg(long)]
        full_w: bool,
    },
    /// The golden relations among generators, with negative controls.
    Relations {
        #[arg(long)]
        n: u8,
    },
    /// The relation polynomials P, Q of the invariant Weyl algebra.
    Zhu {
        #[arg(long)]
        n: u8,
    },
    /// Finite-dimensional modules of dimension `dim`.
    Classify {
        #[arg(long)]
        n: u8,
        #[arg(long)]
        dim: u32,
    },
    /// Symbolic n-th products against the Fock-space mode calculus.
    Oracle {
        #[arg(long)]
        n: u8,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Largest weight any intermediate state may reach.
        #[arg(long, default_value_t = 9)]
        cutoff: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest weight of a sampled field.
        #[arg(long, default_value_t = 3)]
        max_weight: i64,
    },
}

/// Text and JSON renderings of one command's result.
struct Outcome {
    text: String,
    json: Value,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(&cli.command) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            } else {
                print!("{}", out.text);
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("WN2_THREADS") {
        let threads: usize = v.parse().with_context(|| format!("WN2_THREADS={v:?} is not a number"))?;
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Ope { n, left, right, out } => cmd_ope(*n, left, right, out.as_ref()),
        Command::Tables { n } => cmd_tables(*n),
        Command::Verify { n, full_w } => cmd_verify(*n, *full_w),
        Command::Relations { n } => cmd_relations(*n),
        Command::Zhu { n } => cmd_zhu(*n),
        Command::Classify { n, dim } => cmd_classify(*n, *dim),
        Command::Oracle { n, samples, cutoff, seed, max_weight } => {
            cmd_oracle(*n, *samples, *cutoff, *seed, *max_weight)
        }
    }
}

fn model(n: u8, kind: ModelKind) -> Result<ModelContext> {
    build_model(n, kind).with_context(|| format!("building the rank-{n} model"))
}

fn table_json(left: &str, right: &str, poles: &[(u32, String)]) -> Value {
    let poles: Map<String, Value> = poles.iter().map(|(p, v)| (p.to_string(), Value::String(v.clone()))).collect();
    json!({ "pair": [left, right], "poles": poles })
}

fn table_text(left: &str, right: &str, poles: &[(u32, String)]) -> String {
    let mut s = format!("{left} x {right}:");
    if poles.is_empty() {
        s.push_str(" regular\n");
    } else {
        s.push('\n');
        for (p, v) in poles {
            s.push_str(&format!("  (z-w)^-{p}: {v}\n"));
        }
    }
    s
}

fn cmd_ope(n: u8, left: &str, right: &str, out: Option<&PathBuf>) -> Result<Outcome> {
    let m = model(n, ModelKind::BcBg)?;
    let a = syntax::parse(left, &m).with_context(|| format!("parsing {left:?}"))?;
    let b = syntax::parse(right, &m).with_context(|| format!("parsing {right:?}"))?;
    let table = ope::ope_singular(&a, &b);
    let poles = commutant::render_table(&m, &table)?;
    let json = table_json(left, right, &poles);
    if let Some(path) = out {
        std::fs::write(path, serde_json::to_string_pretty(&json)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(Outcome { text: table_text(left, right, &poles), json, pass: true })
}

fn cmd_tables(n: u8) -> Result<Outcome> {
    let m = model(n, ModelKind::Bg)?;
    let tables = commutant::generator_ope_tables(&m)?;
    let mut text = String::new();
    let mut entries = Vec::new();
    for t in &tables {
        let poles = commutant::render_table(&m, &t.table)?;
        text.push_str(&table_text(&t.left, &t.right, &poles));
        entries.push(table_json(&t.left, &t.right, &poles));
    }
    let golden = commutant::compare_with_golden(&m, &tables)?;
    text.push_str(&format!("golden: {} entries checked, {} mismatches\n", golden.entries_checked, golden.mismatches.len()));
    let mismatches: Vec<Value> = golden
        .mismatches
        .iter()
        .map(|x| {
            text.push_str(&format!("  MISMATCH {} x {} pole {}\n", x.left, x.right, x.pole));
            json!({ "pair": [x.left, x.right], "pole": x.pole, "expected": render(&x.expected), "computed": render(&x.computed) })
        })
        .collect();
    if let Some(a) = &golden.annotation {
        text.push_str(&format!("note: {a}\n"));
    }
    let json = json!({
        "n": n,
        "tables": entries,
        "golden": {
            "entries_checked": golden.entries_checked,
            "mismatches": mismatches,
            "c1c1_pole": golden.c1c1_pole,
            "annotation": golden.annotation,
        },
    });
    Ok(Outcome { text, json, pass: golden.pass() })
}

fn cmd_verify(n: u8, full_w: bool) -> Result<Outcome> {
    let kind = if full_w { ModelKind::BcBg } else { ModelKind::Bg };
    let m = model(n, kind)?;
    let mut fields: Vec<(String, wn2_core::FieldExpr)> = Vec::new();
    for g in m.generator_names() {
        fields.push((g.clone(), m.generator(&g)?));
    }
    for i in 2..=n {
        if fixtures::casimir(n, i).is_some() {
            let name = format!("C[{i}]");
            if !fields.iter().any(|(g, _)| *g == name) {
                fields.push((name, m.casimir_field(i)?));
            }
        }
    }
    let mut sets = vec![("sl_n x sl_n", commutant::currents(&m, CurrentSet::SlBoth)?)];
    if full_w {
        sets.push(("psl(n|n)", commutant::currents(&m, CurrentSet::Psl)?));
    }
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut pass = true;
    for (set, currents) in &sets {
        for (name, field) in &fields {
            let r = commutant::verify_membership(name, field, currents);
            pass &= r.pass;
            let failures: Vec<Value> = r
                .failures()
                .map(|f| json!({ "current": f.current, "pole": f.pole, "value": render(&f.value) }))
                .collect();
            text.push_str(&format!(
                "{} {name} against {set}: {} poles checked{}\n",
                if r.pass { "PASS" } else { "FAIL" },
                r.residuals.len(),
                if failures.is_empty() { String::new() } else { format!(", {} nonzero", failures.len()) }
            ));
            for f in r.failures().take(5) {
                text.push_str(&format!("  {} pole {}: {}\n", f.current, f.pole, render(&f.value)));
            }
            reports.push(json!({
                "field": name, "currents": set, "pass": r.pass,
                "checked": r.residuals.len(), "failures": failures,
            }));
        }
    }
    Ok(Outcome { text, json: json!({ "n": n, "full_w": full_w, "reports": reports, "pass": pass }), pass })
}

fn cmd_relations(n: u8) -> Result<Outcome> {
    let m = model(n, ModelKind::Bg)?;
    let reports = commutant::check_golden_relations(&m)?;
    let mut text = String::new();
    let mut pass = true;
    let mut items = Vec::new();
    for r in &reports {
        let rejected = r.controls_rejected.iter().filter(|x| **x).count();
        let ok = r.holds && rejected == r.controls_rejected.len();
        pass &= ok;
        text.push_str(&format!(
            "{} {}: holds = {}, perturbations rejected {}/{}\n",
            if ok { "PASS" } else { "FAIL" },
            r.name,
            r.holds,
            rejected,
            r.controls_rejected.len()
        ));
        items.push(json!({
            "name": r.name, "holds": r.holds, "residual": render(&r.residual),
            "controls_rejected": r.controls_rejected,
        }));
    }
    Ok(Outcome { text, json: json!({ "n": n, "relations": items, "pass": pass }), pass })
}

fn cmd_zhu(n: u8) -> Result<Outcome> {
    let inv = zhu::invariants(n, ZhuGrading::Integral)?;
    let (p, q) = zhu::compute_pq_from(&inv)?;
    let leading = zhu::leading_symbol_check(&inv, &p, &q);
    let mut text = format!("P = {p}\nQ = {q}\nleading symbol = -det: {leading}\n");
    let mut json = json!({ "n": n, "P": p.to_string(), "Q": q.to_string(), "leading_symbol_ok": leading });
    if n == 2 {
        let bracket = inv.d.commutator(&inv.d_prime);
        let mut expected = inv.c[0].clone();
        expected.add_scaled(&zhu::WeylElement::one(2), &Rational::from_int(2));
        let ok = bracket == expected;
        text.push_str(&format!("[d, d'] = c1 + 2: {ok}\n"));
        json["sl2_bracket_ok"] = Value::Bool(ok);
    }
    Ok(Outcome { text, json, pass: leading })
}

fn poly_json(p: &zhu::Poly) -> Value {
    Value::String(p.render(&family_name))
}

fn cmd_classify(n: u8, dim: u32) -> Result<Outcome> {
    if dim == 0 {
        bail!("--dim must be at least 1");
    }
    let fam = zhu::classify_modules(n, dim)?;
    let solved: Map<String, Value> = fam.solved.iter().map(|(v, x)| (family_name(*v), poly_json(x))).collect();
    let exclusions: Vec<Value> = fam
        .exclusions
        .iter()
        .map(|e| {
            let point = e.point.as_ref().map(|pt| {
                pt.iter().map(|(v, x)| (family_name(*v), poly_json(x))).collect::<Map<String, Value>>()
            });
            json!({ "i": poly_json(&e.i), "nonzero": poly_json(&e.condition), "excluded_point": point })
        })
        .collect();
    let json = json!({
        "n": n,
        "m": dim,
        "solved": solved,
        "free": fam.free.iter().map(|v| family_name(*v)).collect::<Vec<_>>(),
        "exclusions": exclusions,
    });
    Ok(Outcome { text: fam.to_string(), json, pass: true })
}

fn cmd_oracle(n: u8, samples: usize, cutoff: i64, seed: u64, max_weight: i64) -> Result<Outcome> {
    if !(1..=4).contains(&n) {
        bail!("--n must be between 1 and 4");
    }
    if max_weight < 1 {
        bail!("--max-weight must be at least 1");
    }
    let mut symbols = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            symbols.extend([Symbol::beta(i, j), Symbol::gamma(i, j), Symbol::b(i, j), Symbol::c(i, j)]);
        }
    }
    let report = fock::compare_random(
        &symbols,
        samples,
        &Rational::from_int(max_weight),
        &Rational::from_int(cutoff),
        seed,
        (-4, 4),
    )?;
    let pass = report.pass();
    let mut text = format!(
        "{} seed {seed}: {} samples, {} products ({} nonzero), {} disagreements\n",
        if pass { "PASS" } else { "FAIL" },
        report.samples,
        report.checked,
        report.nonzero,
        report.failures.len()
    );
    for f in report.failures.iter().take(5) {
        text.push_str(&format!("  n = {}: {} | {}\n", f.n, f.left, f.right));
    }
    let failures: Vec<Value> =
        report.failures.iter().map(|f| json!({ "n": f.n, "left": f.left, "right": f.right })).collect();
    let json = json!({
        "n": n, "seed": seed, "samples": samples, "cutoff": report.cutoff.to_string(),
        "max_weight": max_weight, "products": [report.products.0, report.products.1],
        "checked": report.checked, "nonzero": report.nonzero, "failures": failures, "pass": pass,
    });
    Ok(Outcome { text, json, pass })
}

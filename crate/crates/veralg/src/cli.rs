//! Command-line interface: evaluation, word-system checking, parameter
//! composition, the general solver, theorem replay, and dimension counts.
//!
//! Exit codes: 0 = success / theorem matches / checks pass, 1 = a check or
//! verification failed, 2 = bad input (arguments, documents, expressions).

use crate::autgroup::{
    compose, params_from_wordsystem, params_to_wordsystem, solve_general_wordsystem,
    theorem_report, StronglyStableParams,
};
use crate::exactfield::FieldSpec;
use crate::exprio::{
    format_expression, format_generic, load_params, load_wordsystem, parse_expression,
    save_params,
};
use crate::relfree::Variety;
use crate::scalar::Scalar;
use crate::verbal::compose_systems;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "veralg",
    about = "Exact verbal-operation computations on free algebras of small varieties"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Variety: free | commutative | anticommutative | power-associative |
    /// alternative | jordan | nilpotentN (N >= 3).
    #[arg(long, global = true, default_value = "nilpotent3")]
    pub variety: String,

    /// Base field: `rationals` or `quadratic:d` (adjoin sqrt(d)).
    #[arg(long, global = true, default_value = "rationals")]
    pub field: String,

    /// Truncation degree for all computation (max 5; defaults to the
    /// variety's natural cap).
    #[arg(long = "degree-cap", global = true)]
    pub degree_cap: Option<u32>,

    /// Generator count for evaluation and dimension counts (max 3).
    #[arg(long, global = true, default_value_t = 2)]
    pub gens: u32,

    /// Emit a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Sample count for sampled checks.
    #[arg(long, global = true, default_value_t = 100)]
    pub samples: u32,

    /// Cross-check parameter-level results against the word-level oracle.
    #[arg(long, global = true)]
    pub verify: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse an expression and print its normal form in the variety.
    Eval { expression: String },
    /// Load a word-system document and run the full battery of checks.
    Check { path: PathBuf },
    /// Compose two parameter documents (the first argument acts first).
    Compose { first: PathBuf, second: PathBuf },
    /// Solve the word-system equations of the variety from scratch.
    Solve,
    /// Derive the quotient group A/Y for the variety and compare with the
    /// reference table.
    Theorem,
    /// Print the dimensions of the graded components of the relatively
    /// free algebra.
    Dims,
}

struct Config {
    variety: Variety,
    field: FieldSpec,
    gens: u32,
    json: bool,
    seed: u64,
    samples: u32,
    verify: bool,
}

/// Run with the given arguments; returns the process exit code.
pub fn run(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version with success exit codes.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match build_config(&cli) {
        Ok(config) => match dispatch(&cli.command, &config) {
            Ok(code) => code,
            Err(msg) => {
                eprintln!("error: {msg}");
                2
            }
        },
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn build_config(cli: &Cli) -> Result<Config, String> {
    let mut variety = Variety::from_cli_name(&cli.variety).map_err(|e| e.to_string())?;
    let field = parse_field_flag(&cli.field)?;
    if let Some(cap) = cli.degree_cap {
        if !(1..=5).contains(&cap) {
            return Err(format!("--degree-cap must be between 1 and 5, got {cap}"));
        }
        variety = variety.with_working_cap(cap);
    }
    if !(1..=3).contains(&cli.gens) {
        return Err(format!("--gens must be between 1 and 3, got {}", cli.gens));
    }
    Ok(Config {
        variety,
        field,
        gens: cli.gens,
        json: cli.json,
        seed: cli.seed,
        samples: cli.samples,
        verify: cli.verify,
    })
}

fn parse_field_flag(s: &str) -> Result<FieldSpec, String> {
    if s == "rationals" {
        return Ok(FieldSpec::Rationals);
    }
    if let Some(d) = s.strip_prefix("quadratic:") {
        let d: i64 = d
            .parse()
            .map_err(|_| format!("bad quadratic field parameter `{d}`"))?;
        return FieldSpec::quadratic(d).map_err(|e| e.to_string());
    }
    Err(format!(
        "unknown field `{s}` (expected `rationals` or `quadratic:d`)"
    ))
}

fn context_lines(config: &Config) -> Vec<String> {
    vec![
        format!("variety: {}", config.variety.cli_name()),
        format!("degree cap: {}", config.variety.working_cap()),
        format!("generator cap: {}", config.gens),
        format!("seed: {}", config.seed),
    ]
}

fn context_json(config: &Config) -> Value {
    json!({
        "variety": config.variety.cli_name(),
        "degree_cap": config.variety.working_cap(),
        "generator_cap": config.gens,
        "seed": config.seed,
    })
}

fn read_doc(path: &PathBuf) -> Result<Value, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: invalid JSON: {e}", path.display()))
}

fn dispatch(command: &Command, config: &Config) -> Result<i32, String> {
    match command {
        Command::Eval { expression } => cmd_eval(config, expression),
        Command::Check { path } => cmd_check(config, path),
        Command::Compose { first, second } => cmd_compose(config, first, second),
        Command::Solve => cmd_solve(config),
        Command::Theorem => cmd_theorem(config),
        Command::Dims => cmd_dims(config),
    }
}

fn cmd_eval(config: &Config, expression: &str) -> Result<i32, String> {
    let parsed =
        parse_expression(expression, config.gens, &config.field).map_err(|e| e.to_string())?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let nf = config
        .variety
        .normal_form(&parsed.element)
        .map_err(|e| e.to_string())?;
    if config.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "context": context_json(config),
                "normal_form": format_expression(&nf),
            }))
            .unwrap()
        );
    } else {
        println!("{}", format_expression(&nf));
    }
    Ok(0)
}

fn cmd_check(config: &Config, path: &PathBuf) -> Result<i32, String> {
    let doc = read_doc(path)?;
    let w = load_wordsystem(&doc).map_err(|e| e.to_string())?;
    let op1 = w.check_op1().map_err(|e| e.to_string())?;
    let op2 = w.check_op2_axioms(3).map_err(|e| e.to_string())?;
    let iso = w.check_sigma_iso(config.gens).map_err(|e| e.to_string())?;
    let inner = w.inner_solve().map_err(|e| e.to_string())?;
    let pass = op1.verdict && op2.verdict && iso.verdict;

    let inner_desc = match &inner {
        crate::verbal::InnerOutcome::Certificate(p) => {
            ("yes", format!("certificate p(x) = {}", format_expression(p)))
        }
        crate::verbal::InnerOutcome::Infeasible { witness } => {
            ("no", format!("obstruction: {witness}"))
        }
    };
    if config.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "context": context_json(config),
                "op1": op1.verdict,
                "op2_axioms": op2.verdict,
                "sigma_isomorphism": iso.verdict,
                "inner": inner_desc.0 == "yes",
                "inner_detail": inner_desc.1,
                "witnesses": [
                    op1.witnesses.iter().map(|x| x.axiom.clone()).collect::<Vec<_>>(),
                    op2.witnesses.iter().map(|x| x.axiom.clone()).collect::<Vec<_>>(),
                    iso.witnesses.iter().map(|x| x.axiom.clone()).collect::<Vec<_>>(),
                ],
            }))
            .unwrap()
        );
    } else {
        for line in context_lines(config) {
            println!("{line}");
        }
        for (name, report) in [("Op1 shape", &op1), ("Op2 axioms", &op2), ("sigma isomorphism", &iso)] {
            println!(
                "{name}: {}",
                if report.verdict { "pass" } else { "FAIL" }
            );
            for wit in &report.witnesses {
                println!("  witness [{} gens]: {} -> {}", wit.generator_count, wit.axiom, wit.residual);
            }
        }
        println!("inner: {} ({})", inner_desc.0, inner_desc.1);
    }
    Ok(if pass { 0 } else { 1 })
}

fn cmd_compose(config: &Config, first: &PathBuf, second: &PathBuf) -> Result<i32, String> {
    let p1 = load_params(&read_doc(first)?).map_err(|e| e.to_string())?;
    let p2 = load_params(&read_doc(second)?).map_err(|e| e.to_string())?;
    let composed = compose(&p2, &p1).map_err(|e| e.to_string())?;
    let mut verification = None;
    if config.verify {
        let oracle = oracle_compose(&p1, &p2)?;
        if oracle != composed {
            eprintln!("error: parameter law disagrees with the word-level oracle");
            return Ok(1);
        }
        verification = Some("oracle match: exact".to_string());
    }
    let doc = save_params(&composed);
    if config.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "context": context_json(config),
                "composed": doc,
                "verification": verification,
            }))
            .unwrap()
        );
    } else {
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        if let Some(v) = verification {
            println!("{v}");
        }
    }
    Ok(0)
}

fn oracle_compose(
    p1: &StronglyStableParams,
    p2: &StronglyStableParams,
) -> Result<StronglyStableParams, String> {
    let w1 = params_to_wordsystem(p1).map_err(|e| e.to_string())?;
    let w2 = params_to_wordsystem(p2).map_err(|e| e.to_string())?;
    let w3 = compose_systems(&w1, &w2).map_err(|e| e.to_string())?;
    params_from_wordsystem(&w3).map_err(|e| e.to_string())
}

fn cmd_solve(config: &Config) -> Result<i32, String> {
    let fam = solve_general_wordsystem(&config.variety).map_err(|e| e.to_string())?;
    if config.json {
        let branches: Vec<Value> = fam
            .branches
            .iter()
            .map(|b| {
                json!({
                    "presets": b.presets.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                    "free_parameters": b.free_parameters,
                    "relations": b
                        .relations
                        .iter()
                        .map(|r| json!({
                            "unknown": r.unknown,
                            "location": r.location,
                            "value": r.value.to_string(),
                        }))
                        .collect::<Vec<_>>(),
                    "w_plus": format_generic(&b.closed_form.w_plus),
                    "w_dot": format_generic(&b.closed_form.w_dot),
                    "scalar_family": b
                        .closed_form
                        .scalar_family
                        .coefficients
                        .iter()
                        .map(|(m, c)| (m.render(), c.to_string()))
                        .collect::<std::collections::BTreeMap<_, _>>(),
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "context": context_json(config),
                "variety": fam.variety.cli_name(),
                "automorphism_free": fam.automorphism_free,
                "branches": branches,
            }))
            .unwrap()
        );
    } else {
        for line in context_lines(config) {
            println!("{line}");
        }
        println!(
            "base-field automorphism: free parameter (any automorphism of k)"
        );
        for (i, b) in fam.branches.iter().enumerate() {
            println!("branch {}:", i + 1);
            if !b.presets.is_empty() {
                println!(
                    "  branch condition: {}",
                    b.presets
                        .iter()
                        .map(|r| format!("{} = 0", r.unknown))
                        .collect::<Vec<_>>()
                        .join(", ")
                );
            }
            println!("  free parameters: {}", b.free_parameters.join(", "));
            let nontrivial: Vec<&crate::autgroup::Relation> = b
                .relations
                .iter()
                .filter(|r| !r.value.is_zero())
                .collect();
            println!(
                "  determined coefficients: {} total, {} nonzero:",
                b.relations.len(),
                nontrivial.len()
            );
            for r in nontrivial {
                println!("    {r}");
            }
            println!("  w_plus = {}", format_generic(&b.closed_form.w_plus));
            println!("  w_dot  = {}", format_generic(&b.closed_form.w_dot));
            for (m, c) in &b.closed_form.scalar_family.coefficients {
                println!("  w_lambda[{}] = {}", m.render(), c);
            }
        }
    }
    Ok(0)
}

fn cmd_theorem(config: &Config) -> Result<i32, String> {
    let rep = theorem_report(&config.variety, config.field, config.seed, config.samples)
        .map_err(|e| e.to_string())?;
    let verdict = if rep.matches {
        format!("A/Y = {} — MATCHES Table row {}", rep.descriptor, rep.row)
    } else {
        format!(
            "A/Y = {} — MISMATCH with Table row {} ({})",
            rep.descriptor, rep.row, rep.reference
        )
    };
    if config.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "context": context_json(config),
                "row": rep.row,
                "descriptor": rep.descriptor,
                "reference": rep.reference,
                "matches": rep.matches,
                "evidence": rep.evidence,
                "samples": rep.samples,
                "verdict": verdict,
            }))
            .unwrap()
        );
    } else {
        for line in context_lines(config) {
            println!("{line}");
        }
        println!("samples: {}", rep.samples);
        for e in &rep.evidence {
            println!("evidence: {e}");
        }
        println!("{verdict}");
    }
    Ok(if rep.matches { 0 } else { 1 })
}

fn cmd_dims(config: &Config) -> Result<i32, String> {
    let cap = config.variety.working_cap();
    let mut rows = Vec::new();
    let mut total = 0usize;
    for d in 1..=cap {
        let count = config
            .variety
            .reduced_monomials_of_degree(config.gens, d)
            .map_err(|e| e.to_string())?
            .len();
        total += count;
        rows.push((d, count));
    }
    if config.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "context": context_json(config),
                "dimensions": rows
                    .iter()
                    .map(|(d, n)| json!({"degree": d, "dim": n}))
                    .collect::<Vec<_>>(),
                "total": total,
            }))
            .unwrap()
        );
    } else {
        for line in context_lines(config) {
            println!("{line}");
        }
        for (d, n) in &rows {
            println!("degree {d}: dim {n}");
        }
        println!("total (degrees 1..={cap}): {total}");
    }
    Ok(0)
}

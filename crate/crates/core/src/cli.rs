//! Command-line front end. Exit codes: 0 success, 1 equivalence or shape
//! failure, 2 usage, parse, or I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::bdd::{BddManager, BddRef};
use crate::bnet::{compile, validate_bdd_shape, ShapeReport};
use crate::expr::{parse_with_arity, truth_table, Assignment, Expr};
use crate::inference::{self, check_equivalence, CheckMode, CheckOptions, EquivalenceReport};
use crate::tree::build_tree;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "bddnet",
    version,
    about = "Boolean expressions as BDDs and as Bayesian nets"
)]
pub struct RunConfig {
    /// Expression, e.g. "(x1 | x2) & x3"
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    pub expr: Option<String>,
    /// File holding the expression
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Number of variables; defaults to the highest variable mentioned
    #[arg(long)]
    pub n: Option<usize>,
    /// Variable order from the top level down, as 0-based ordinals
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<usize>>,
    /// Directory for DOT and JSON artifacts
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for sampled equivalence checks
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest arity enumerated exhaustively
    #[arg(long, default_value_t = inference::DEFAULT_CAP)]
    pub cap: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the truth table
    Table,
    /// Print (or write) the full decision tree as DOT
    Tree,
    /// Build the reduced BDD and print its size
    Bdd,
    /// Write the BDD and the equivalent Bayesian net, then check the net's shape
    Compile,
    /// Compile, then check the net against the BDD on every assignment
    Verify {
        /// Flip one table bit of the net before checking
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Probability that f = 1 for independent Bernoulli inputs
    Marginal {
        /// P(x_i = 1) for each variable, comma separated
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        p: Vec<String>,
    },
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cfg, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

type CmdResult = Result<u8, String>;

struct Loaded {
    expr: Expr,
    n: usize,
}

fn load(cfg: &RunConfig) -> Result<Loaded, String> {
    let text = match (&cfg.expr, &cfg.file) {
        (Some(text), _) => text.clone(),
        (None, Some(path)) => {
            fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?
        }
        (None, None) => return Err("one of --expr or --file is required".into()),
    };
    let expr = match cfg.n {
        Some(n) => parse_with_arity(text.trim(), n),
        None => crate::expr::parse(text.trim()),
    }
    .map_err(|e| e.to_string())?;
    let n = cfg.n.unwrap_or_else(|| expr.min_arity());
    Ok(Loaded { expr, n })
}

fn manager(cfg: &RunConfig, n: usize) -> Result<BddManager, String> {
    match &cfg.order {
        Some(order) => {
            if order.len() != n {
                return Err(format!(
                    "--order lists {} variables, arity is {n}",
                    order.len()
                ));
            }
            BddManager::with_order(order.clone())
        }
        None => BddManager::new(n),
    }
    .map_err(|e| e.to_string())
}

fn check_cap(cfg: &RunConfig, n: usize) -> Result<(), String> {
    if n > cfg.cap {
        return Err(format!(
            "arity {n} exceeds the enumeration cap {} (see --cap)",
            cfg.cap
        ));
    }
    Ok(())
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> String + '_ {
    move |e| format!("cannot write {}: {e}", path.display())
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(io_err(&path))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes") + "\n"
}

fn out_line(out: &mut dyn Write, line: std::fmt::Arguments<'_>) -> Result<(), String> {
    writeln!(out, "{line}").map_err(|e| format!("cannot write output: {e}"))
}

fn execute(cfg: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let Loaded { expr, n } = load(cfg)?;
    match &cfg.command {
        Command::Table => cmd_table(cfg, &expr, n, out),
        Command::Tree => cmd_tree(cfg, &expr, n, out),
        Command::Bdd => cmd_bdd(cfg, &expr, n, out),
        Command::Compile => cmd_compile_verify(cfg, &expr, n, false, false, out),
        Command::Verify { inject_fault } => {
            cmd_compile_verify(cfg, &expr, n, true, *inject_fault, out)
        }
        Command::Marginal { p } => cmd_marginal(cfg, &expr, n, p, out),
    }
}

fn cmd_table(cfg: &RunConfig, f: &Expr, n: usize, out: &mut dyn Write) -> CmdResult {
    check_cap(cfg, n)?;
    let table = truth_table(f, n).map_err(|e| e.to_string())?;
    for (k, x) in Assignment::all(n).enumerate() {
        let value = u8::from(table.get(k));
        if n == 0 {
            out_line(out, format_args!("| {value}"))?;
        } else {
            out_line(out, format_args!("{x} | {value}"))?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_tree(cfg: &RunConfig, f: &Expr, n: usize, out: &mut dyn Write) -> CmdResult {
    check_cap(cfg, n)?;
    let tree = build_tree(f, n).map_err(|e| e.to_string())?;
    match &cfg.out {
        Some(dir) => {
            write_artifact(dir, "tree.dot", &tree.to_dot())?;
            out_line(out, format_args!("tree nodes: {}", tree.node_count()))?;
            out_line(out, format_args!("leaves: {}", tree.leaves().len()))?;
        }
        None => out
            .write_all(tree.to_dot().as_bytes())
            .map_err(|e| format!("cannot write output: {e}"))?,
    }
    Ok(EXIT_OK)
}

fn build(cfg: &RunConfig, f: &Expr, n: usize) -> Result<(BddManager, BddRef), String> {
    let mut m = manager(cfg, n)?;
    let r = m.from_expr(f).map_err(|e| e.to_string())?;
    Ok((m, r))
}

fn write_bdd(dir: &Path, m: &BddManager, r: BddRef) -> Result<(), String> {
    let dot = m.to_dot(r).map_err(|e| e.to_string())?;
    let json = m.to_json(r).map_err(|e| e.to_string())?;
    write_artifact(dir, "bdd.dot", &dot)?;
    write_artifact(dir, "bdd.json", &to_json(&json))
}

fn cmd_bdd(cfg: &RunConfig, f: &Expr, n: usize, out: &mut dyn Write) -> CmdResult {
    let (m, r) = build(cfg, f, n)?;
    let count = m.node_count(r).map_err(|e| e.to_string())?;
    let sat = m.sat_count(r).map_err(|e| e.to_string())?;
    out_line(out, format_args!("internal nodes: {}", count.internal))?;
    out_line(out, format_args!("total nodes: {}", count.total))?;
    out_line(out, format_args!("satisfying assignments: {sat}"))?;
    if let Some(dir) = &cfg.out {
        write_bdd(dir, &m, r)?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    #[serde(flatten)]
    equivalence: &'a EquivalenceReport,
    shape: &'a ShapeReport,
}

fn cmd_compile_verify(
    cfg: &RunConfig,
    f: &Expr,
    n: usize,
    verify: bool,
    inject_fault: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let (m, r) = build(cfg, f, n)?;
    let mut net = compile(&m, r).map_err(|e| e.to_string())?;
    if inject_fault {
        inference::inject_fault(&mut net, &Assignment::new(vec![false; n]))
            .map_err(|e| e.to_string())?;
    }
    let shape = validate_bdd_shape(&net);
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    write_bdd(&dir, &m, r)?;
    write_artifact(&dir, "bnet.dot", &net.to_dot())?;
    write_artifact(&dir, "bnet.json", &net.to_json_string())?;

    out_line(
        out,
        format_args!(
            "net: {} if-then-else nodes, {} square nodes, {} arrows",
            net.if_then_else_count(),
            net.square_count(),
            net.arrow_count()
        ),
    )?;
    out_line(
        out,
        format_args!("shape: {}", if shape.pass { "pass" } else { "FAIL" }),
    )?;
    for v in &shape.violations {
        out_line(out, format_args!("  {}: {}", v.rule, v.detail))?;
    }
    if let Some(note) = &shape.note {
        out_line(out, format_args!("  note: {note}"))?;
    }
    let mut ok = shape.pass;

    if verify {
        let opts = CheckOptions {
            cap: cfg.cap,
            seed: cfg.seed,
            ..CheckOptions::default()
        };
        let eq = check_equivalence(&m, r, &net, Some(f), &opts).map_err(|e| e.to_string())?;
        write_artifact(
            &dir,
            "report.json",
            &to_json(&VerifyReport {
                equivalence: &eq,
                shape: &shape,
            }),
        )?;
        out_line(
            out,
            format_args!(
                "equivalence: {} ({} assignments, {}, {} mismatches)",
                if eq.passed() { "pass" } else { "FAIL" },
                eq.checked,
                match eq.mode {
                    CheckMode::Exhaustive => "exhaustive",
                    CheckMode::Sampled => "sampled",
                },
                eq.mismatches
            ),
        )?;
        for x in &eq.counterexamples {
            out_line(out, format_args!("  counterexample: {x}"))?;
        }
        ok &= eq.passed();
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

/// Reads `a/b`, an integer, or a decimal with optional exponent as an exact
/// rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        return (!den.is_zero()).then(|| BigRational::new(num, den));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let (sign, int_part) = match int_part.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, int_part.strip_prefix('+').unwrap_or(int_part)),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let value = BigRational::from_integer(digits.parse::<BigInt>().ok()? * sign);
    let scale = exponent - i32::try_from(frac_part.len()).ok()?;
    let ten = BigRational::from_integer(BigInt::from(10));
    Some(if scale >= 0 {
        value * num_traits::pow(ten, scale as usize)
    } else {
        value / num_traits::pow(ten, scale.unsigned_abs() as usize)
    })
}

/// Exact `a/b` when numerator and denominator fit in 64 bits, otherwise a
/// 17-significant-digit decimal.
pub fn format_probability(p: &BigRational) -> String {
    let fits = p.numer().bits() <= 64 && p.denom().bits() <= 64;
    if fits {
        if p.denom() == &BigInt::from(1) {
            p.numer().to_string()
        } else {
            format!("{}/{}", p.numer(), p.denom())
        }
    } else {
        format!("{:.16e}", p.to_f64().unwrap_or(f64::NAN))
    }
}

fn cmd_marginal(
    cfg: &RunConfig,
    f: &Expr,
    n: usize,
    p: &[String],
    out: &mut dyn Write,
) -> CmdResult {
    if p.len() != n {
        return Err(format!("--p has {} entries, arity is {n}", p.len()));
    }
    let probs = p
        .iter()
        .map(|s| parse_rational(s).ok_or_else(|| format!("cannot read probability {s:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    let (m, r) = build(cfg, f, n)?;
    let value = inference::bernoulli_marginal(&m, r, &probs).map_err(|e| e.to_string())?;
    out_line(out, format_args!("{}", format_probability(&value)))?;
    Ok(EXIT_OK)
}

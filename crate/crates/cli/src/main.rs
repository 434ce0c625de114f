use std::fmt::Write as _;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussmix::apply::{approximate, relative_error, Functional, FunctionalKind};
use gaussmix::exprlang::{self, Expr};
use gaussmix::families::FamilySpec;
use gaussmix::jacobi::JacobiMatrix;
use gaussmix::rule::{gauss_rule, gauss_rule_eigenvalue_only};
use gaussmix::tables::{self, Report, Which};
use serde_json::{json, Map, Number, Value};

#[derive(Parser)]
#[command(
    name = "gaussmix",
    version,
    about = "Gauss quadrature from three-term recurrences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the nodes and weights of an n-point rule.
    #[command(allow_negative_numbers = true)]
    Rule {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, value_enum, default_value_t = Algorithm::GolubWelsch)]
        algorithm: Algorithm,
    },
    /// Approximate the sum of f over the family's mass points.
    #[command(allow_negative_numbers = true)]
    Sum {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        /// Expression in x, e.g. "3^x/gamma(x+1)".
        #[arg(long)]
        f: String,
        /// Sum against the measure instead of the plain sum.
        #[arg(long)]
        weighted: bool,
        /// Substitute NAME by VALUE in the expressions before parsing.
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
        /// Exact value (an expression without x) to report the relative error against.
        #[arg(long)]
        exact: Option<String>,
    },
    /// Recompute one of the reference tables.
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
        /// Truncation size of the Table 3 reference.
        #[arg(long, default_value_t = tables::DEFAULT_ORACLE_SIZE)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    GolubWelsch,
    EigenvalueOnly,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Charlier,
    Meixner,
    Krawtchouk,
    #[value(alias = "cdh")]
    ContinuousDualHahn,
    Wilson,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long = "M", alias = "m")]
    m: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
}

/// Marks errors that came from bad input.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn need<T>(value: Option<T>, flag: &str, family: &str) -> anyhow::Result<T> {
    value.ok_or_else(|| usage(format!("{family} requires --{flag}")))
}

impl FamilyArgs {
    fn spec(&self) -> anyhow::Result<FamilySpec> {
        let spec = match self.family {
            FamilyName::Charlier => FamilySpec::Charlier {
                mu: need(self.mu, "mu", "charlier")?,
            },
            FamilyName::Meixner => FamilySpec::Meixner {
                mu: need(self.mu, "mu", "meixner")?,
                beta: need(self.beta, "beta", "meixner")?,
            },
            FamilyName::Krawtchouk => FamilySpec::Krawtchouk {
                m: need(self.m, "M", "krawtchouk")?,
                gamma: need(self.gamma, "gamma", "krawtchouk")?,
            },
            FamilyName::ContinuousDualHahn => FamilySpec::ContinuousDualHahn {
                mu: need(self.mu, "mu", "continuous-dual-hahn")?,
                alpha: need(self.alpha, "alpha", "continuous-dual-hahn")?,
                beta: need(self.beta, "beta", "continuous-dual-hahn")?,
            },
            FamilyName::Wilson => FamilySpec::Wilson {
                mu: need(self.mu, "mu", "wilson")?,
                nu: need(self.nu, "nu", "wilson")?,
                alpha: need(self.alpha, "alpha", "wilson")?,
                beta: need(self.beta, "beta", "wilson")?,
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// 17 significant digits.
fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_real(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(
            real(x)
                .parse::<Number>()
                .expect("formatted float is valid JSON"),
        )
    } else {
        Value::Null
    }
}

fn json_params(spec: &FamilySpec) -> Value {
    let mut map = Map::new();
    for (name, value) in spec.params() {
        let v = match spec {
            FamilySpec::Krawtchouk { m, .. } if name == "M" => json!(m),
            _ => json_real(value),
        };
        map.insert(name.to_string(), v);
    }
    Value::Object(map)
}

fn cmd_rule(
    family: &FamilyArgs,
    n: usize,
    format: Format,
    algorithm: Algorithm,
) -> anyhow::Result<String> {
    let spec = family.spec()?;
    if n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let jac = JacobiMatrix::build(&spec.recurrence()?, n)?;
    let rule = match algorithm {
        Algorithm::GolubWelsch => gauss_rule(&jac)?,
        Algorithm::EigenvalueOnly => gauss_rule_eigenvalue_only(&jac)?,
    };
    Ok(match format {
        Format::Json => {
            let value = json!({
                "family": spec.name(),
                "params": json_params(&spec),
                "n": n,
                "nodes": rule.nodes().iter().map(|&x| json_real(x)).collect::<Vec<_>>(),
                "weights": rule.weights().iter().map(|&w| json_real(w)).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&value)? + "\n"
        }
        Format::Csv => {
            let mut out = String::from("node,weight\n");
            for (x, w) in rule.nodes().iter().zip(rule.weights()) {
                writeln!(out, "{},{}", real(*x), real(*w))?;
            }
            out
        }
    })
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Replaces whole identifiers by parenthesised values. Number literals such
/// as `1e5` are skipped so their exponent marker is never taken as a name.
fn substitute(text: &str, bindings: &[(String, String)]) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                out.push(chars[i]);
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    out.extend(&chars[i..j]);
                    i = j;
                }
            }
        } else if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            match bindings.iter().find(|(name, _)| *name == word) {
                Some((_, value)) => write!(out, "({value})").unwrap(),
                None => out.push_str(&word),
            }
        } else {
            out.push(c);
            i += 1;
        }
    }
    out
}

fn bindings(set: &[String]) -> anyhow::Result<Vec<(String, String)>> {
    let reserved: Vec<&str> = exprlang::Func::ALL
        .iter()
        .map(|f| f.name())
        .chain(["x"])
        .collect();
    set.iter()
        .map(|s| {
            let (name, value) = s
                .split_once('=')
                .ok_or_else(|| usage(format!("--set expects NAME=VALUE, got {s:?}")))?;
            let name = name.trim();
            let valid = name.starts_with(is_ident_start) && name.chars().all(is_ident);
            if !valid || reserved.contains(&name) {
                return Err(usage(format!("cannot bind {name:?}")));
            }
            let value = value.trim();
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    usage(format!(
                        "value of {name} must be a finite number, got {value:?}"
                    ))
                })?;
            Ok((name.to_string(), value.to_string()))
        })
        .collect()
}

fn sum_kind(spec: &FamilySpec, weighted: bool) -> anyhow::Result<FunctionalKind> {
    if !weighted {
        return Ok(FunctionalKind::PlainSum);
    }
    if spec.squared_argument() {
        return Ok(FunctionalKind::MixedSquaredArg);
    }
    let measure = spec.measure()?;
    Ok(if measure.continuous.is_some() {
        FunctionalKind::Mixed
    } else {
        FunctionalKind::WeightedSum
    })
}

fn cmd_sum(
    family: &FamilyArgs,
    n: usize,
    f: &str,
    weighted: bool,
    set: &[String],
    exact: Option<&str>,
) -> anyhow::Result<String> {
    let spec = family.spec()?;
    let bindings = bindings(set)?;
    let expr: Expr = exprlang::parse(&substitute(f, &bindings)).context("parsing --f")?;
    let kind = sum_kind(&spec, weighted)?;
    let integrand = expr.clone();
    let func = Functional::new(kind, spec, n, move |x| {
        integrand.eval(x).unwrap_or(f64::NAN)
    })?;
    let approx = match approximate(&func) {
        Ok(v) => v,
        Err(gaussmix::Error::NonFinite { node, value }) => {
            // report the expression's own domain error when it has one
            expr.eval(node)?;
            return Err(gaussmix::Error::NonFinite { node, value }.into());
        }
        Err(e) => return Err(e.into()),
    };
    let mut out = format!("{}\n", real(approx));
    if let Some(text) = exact {
        let exact_expr =
            exprlang::parse(&substitute(text, &bindings)).context("parsing --exact")?;
        let exact = exact_expr.eval(0.0)?;
        writeln!(
            out,
            "relative_error {}",
            real(relative_error(exact, approx)?)
        )?;
    }
    Ok(out)
}

fn opt_real(x: Option<f64>) -> Value {
    x.map_or(Value::Null, json_real)
}

fn report_json(report: &Report) -> anyhow::Result<String> {
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|row| {
            let mut params = Map::new();
            for (name, value) in &row.params {
                params.insert(name.to_string(), json_real(*value));
            }
            let cells: Vec<Value> = row
                .cells
                .iter()
                .map(|c| {
                    json!({
                        "n": c.order,
                        "approx": opt_real(c.approx),
                        "exact": json_real(c.exact),
                        "relative_error": opt_real(c.relative_error),
                        "published": json_real(c.published),
                        "pass": c.pass,
                        "failure": c.failure,
                    })
                })
                .collect();
            json!({ "family": row.family, "params": params, "cells": cells })
        })
        .collect();
    let value = json!({
        "table": report.which.number(),
        "description": report.description,
        "n": report.orders,
        "band": json_real(tables::BAND),
        "floor": json_real(tables::FLOOR),
        "rows": rows,
        "all_pass": report.all_pass(),
    });
    Ok(serde_json::to_string_pretty(&value)? + "\n")
}

fn csv_opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, real)
}

fn report_csv(report: &Report) -> String {
    let mut out = String::from("table,row,n,approx,exact,relative_error,published,pass\n");
    for (row, c) in report.cells() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            report.which.number(),
            row.label(),
            c.order,
            csv_opt(c.approx),
            real(c.exact),
            csv_opt(c.relative_error),
            real(c.published),
            c.pass
        )
        .unwrap();
    }
    out
}

fn cmd_table(which: u8, k: usize, format: Format) -> anyhow::Result<(String, bool)> {
    let which = match which {
        1 => Which::One,
        2 => Which::Two,
        3 => Which::Three,
        _ => bail!(usage("table must be 1, 2 or 3")),
    };
    if k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    let report = tables::report(which, k)?;
    let text = match format {
        Format::Json => report_json(&report)?,
        Format::Csv => report_csv(&report),
    };
    Ok((text, report.all_pass()))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match err.downcast_ref::<gaussmix::Error>() {
        Some(e) if e.is_validation() => 2,
        _ => 3,
    }
}

fn run(cli: Cli) -> anyhow::Result<(String, bool)> {
    match cli.command {
        Command::Rule {
            family,
            n,
            format,
            algorithm,
        } => Ok((cmd_rule(&family, n, format, algorithm)?, true)),
        Command::Sum {
            family,
            n,
            f,
            weighted,
            set,
            exact,
        } => Ok((
            cmd_sum(&family, n, &f, weighted, &set, exact.as_deref())?,
            true,
        )),
        Command::Table { which, k, format } => cmd_table(which, k, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, ok)) => {
            print!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

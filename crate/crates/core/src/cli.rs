// SPDX-License-Identifier: Apache-2.0

//! Command-line front-end.
//!
//! Exit codes: 0 success or positive verdict, 1 negative verdict, 2 usage
//! or parse error, 3 internal error.

use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::decision::{decide_eq, decide_leq, Options, Verdict};
use crate::error::Error;
use crate::expr::{bounded_semantics, parse, print, Expr};
use crate::parikh::{Alphabet, ParikhVector};
use crate::semilinear::{
    disambiguate, from_expr, member, normalize, to_json, vector_to_json, SemilinearSet,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "cka", version, about = "Commutative regular expressions: normal forms and decisions")]
pub struct Cli {
    /// Comma-separated letters fixing the alphabet and its order.
    #[arg(long, global = true)]
    alphabet: Option<String>,

    /// Degree bound for enumeration.
    #[arg(long, global = true, default_value_t = 6)]
    degree: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Append the rewrite trace as JSON.
    #[arg(long, global = true)]
    trace: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Eq,
    Leq,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the unambiguous semilinear normal form.
    Normalize { expr: String },
    /// Decide equivalence or inclusion.
    Decide {
        #[arg(value_enum)]
        mode: Mode,
        left: String,
        right: String,
    },
    /// Test membership of a monomial such as `a^2 b`.
    Member { vector: String, expr: String },
    /// List every vector of the semantics up to `--degree`.
    Enumerate { expr: String },
    /// Test whether the expression denotes the empty set.
    Empty { expr: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(err: &Error) -> Self {
        let code = match err {
            Error::Syntax { .. }
            | Error::UnknownLetter { .. }
            | Error::InvalidAlphabet(_)
            | Error::DimensionMismatch { .. }
            | Error::Json(_) => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        };
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
        }
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: rendered,
                }
            } else {
                Outcome::ok(code, rendered)
            };
        }
    };
    match execute(&cli) {
        Ok(outcome) => outcome,
        Err(e) => Outcome::error(&e),
    }
}

fn alphabet_for(cli: &Cli, inputs: &[&str]) -> Result<Alphabet, Error> {
    match &cli.alphabet {
        Some(list) => Alphabet::parse_list(list),
        None => Ok(Alphabet::infer(inputs.iter().copied())),
    }
}

fn execute(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Normalize { expr } => {
            let sigma = alphabet_for(cli, &[expr])?;
            let e = parse(expr, &sigma)?;
            let set = disambiguate(&from_expr(&e, sigma.len()));
            let out = match cli.format {
                Format::Text => format_set(&set, &sigma),
                Format::Json => format!("{}\n", to_json(&set, &sigma)),
            };
            Ok(Outcome::ok(EXIT_OK, out))
        }
        Command::Decide { mode, left, right } => {
            let sigma = alphabet_for(cli, &[left, right])?;
            let e = parse(left, &sigma)?;
            let f = parse(right, &sigma)?;
            let options = Options {
                trace: cli.trace,
                ..Options::default()
            };
            let verdict = match mode {
                Mode::Eq => decide_eq(&e, &f, sigma.len(), &options)?,
                Mode::Leq => decide_leq(&e, &f, sigma.len(), &options)?,
            };
            Ok(format_verdict(cli, &verdict, &sigma))
        }
        Command::Member { vector, expr } => {
            let sigma = alphabet_for(cli, &[vector, expr])?;
            let v = sigma.parse_vector(vector)?;
            let e = parse(expr, &sigma)?;
            let holds = member(&normalize(&e, sigma.len()), &v)?;
            let out = match cli.format {
                Format::Text => format!("{}\n", if holds { "yes" } else { "no" }),
                Format::Json => format!(
                    "{}\n",
                    json!({ "member": holds, "vector": vector_to_json(&v, &sigma) })
                ),
            };
            Ok(Outcome::ok(exit_for(holds), out))
        }
        Command::Enumerate { expr } => {
            let sigma = alphabet_for(cli, &[expr])?;
            let e = parse(expr, &sigma)?;
            let vectors = bounded_semantics(&e, sigma.len(), cli.degree);
            let out = match cli.format {
                Format::Text => vectors
                    .iter()
                    .map(|v| format!("{}\n", sigma.format_vector(v)))
                    .collect(),
                Format::Json => {
                    let list: Vec<_> = vectors.iter().map(|v| vector_to_json(v, &sigma)).collect();
                    format!("{}\n", json!({ "alphabet": letters(&sigma), "vectors": list }))
                }
            };
            Ok(Outcome::ok(EXIT_OK, out))
        }
        Command::Empty { expr } => {
            let sigma = alphabet_for(cli, &[expr])?;
            let e = parse(expr, &sigma)?;
            let empty = normalize(&e, sigma.len()).is_empty();
            let out = match cli.format {
                Format::Text => format!("{}\n", if empty { "empty" } else { "nonempty" }),
                Format::Json => format!("{}\n", json!({ "empty": empty })),
            };
            Ok(Outcome::ok(exit_for(empty), out))
        }
    }
}

fn exit_for(holds: bool) -> i32 {
    if holds {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn letters(sigma: &Alphabet) -> Vec<String> {
    sigma.letters().iter().map(char::to_string).collect()
}

/// One term per line as an expression; `0` for the empty set.
fn format_set(set: &SemilinearSet, sigma: &Alphabet) -> String {
    if set.is_empty() {
        return format!("{}\n", print(&Expr::Zero, sigma));
    }
    set.terms()
        .iter()
        .map(|t| format!("{}\n", print(&t.to_expr(), sigma)))
        .collect()
}

fn format_verdict(cli: &Cli, verdict: &Verdict, sigma: &Alphabet) -> Outcome {
    let code = exit_for(verdict.holds);
    let cex = |v: &ParikhVector| sigma.format_vector(v);
    let out = match cli.format {
        Format::Text => {
            let mut out = String::from(if verdict.holds { "HOLDS\n" } else { "FAILS\n" });
            if let Some(v) = &verdict.counterexample {
                let _ = writeln!(out, "counterexample: {}", cex(v));
            }
            if cli.trace {
                let _ = writeln!(out, "{}", verdict.trace.to_json(sigma));
            }
            out
        }
        Format::Json => {
            let mut value = json!({
                "holds": verdict.holds,
                "counterexample": verdict
                    .counterexample
                    .as_ref()
                    .map(|v| json!(vector_to_json(v, sigma))),
            });
            if cli.trace {
                value["trace"] = verdict.trace.to_json(sigma);
            }
            format!("{value}\n")
        }
    };
    Outcome::ok(code, out)
}

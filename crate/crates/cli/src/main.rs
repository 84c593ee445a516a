//! `iterint`: batch evaluation of iterated integrals, MZV tables and
//! identity checks from JSON job files.

mod config;
mod jobs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::jobs::{Failure, Output};

#[derive(Parser, Debug)]
#[command(name = "iterint", version, about = "Iterated integrals on punctured spheres and tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the `polylog` jobs of a config file.
    Polylog(Common),
    /// Evaluate the `mzv` jobs of a config file.
    Mzv(Common),
    /// Run an identity suite.
    Check(CheckArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON job file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Truncation depth.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Quadrature tolerance (`check`: residual tolerance).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed for randomized checks.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct CheckArgs {
    /// shuffle, fay, structure, homotopy, chen, variation, monodromy or associator.
    pub suite: String,
    #[command(flatten)]
    pub common: Common,
    /// Genus for the variation suite.
    #[arg(long)]
    pub genus: Option<u8>,
    /// Modulus for the Fay suite, e.g. `i`, `0.5+i` or `0.5,1` (repeatable).
    #[arg(long)]
    pub tau: Vec<String>,
    /// Number of random cases.
    #[arg(long)]
    pub cases: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, result) = match &cli.command {
        Command::Polylog(c) => (c, jobs::polylog(c)),
        Command::Mzv(c) => (c, jobs::mzv(c)),
        Command::Check(c) => (&c.common, jobs::check(c)),
    };
    match result.and_then(|out| emit(common, out)) {
        Ok(passed) => {
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn emit(common: &Common, out: Output) -> Result<bool, Failure> {
    let text = match common.format {
        Format::Json => out.json().map_err(Failure::Numerical)?,
        Format::Csv => out.csv().map_err(Failure::Numerical)?,
    };
    match &common.out {
        Some(p) => std::fs::write(p, &text)
            .map_err(|e| Failure::Config(anyhow::anyhow!("cannot write {}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    if let Output::Check(r) = &out {
        for c in r.cases.iter().filter(|c| !c.pass) {
            eprintln!("FAIL {}: residual {:e} > {:e}", c.name, c.residual, c.tol);
        }
    }
    Ok(out.passed())
}

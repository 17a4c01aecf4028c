//! `contextlab`: verify, complete and evaluate Peres-Mermin triples from the
//! command line.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 I/O or parse error,
//! 3 structural refusal (the spectrum admits no anti-commuting partner).

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use contextlab::bounds::{DEFAULT_GRADIENT_TOL, DEFAULT_STARTS};
use contextlab::Sign;

use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "contextlab", version, about = "Peres-Mermin squares built from arbitrary unitaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the triple algebra, context compatibility and context products.
    Verify(VerifyArgs),
    /// Build an anti-commuting partner and the third operator for a unitary.
    Complete(CompleteArgs),
    /// Evaluate <Re X> over random pure and mixed bipartite states.
    Violate(ViolateArgs),
    /// Classical bound for dichotomic or unit-modulus assignments.
    Bound(BoundArgs),
    /// Emit a named operator family.
    Catalog(CatalogArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    u1: PathBuf,
    u2: PathBuf,
    u3: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Sign of U1 U2 U3 = ±i; inferred from the product when omitted.
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
    sign: Option<Sign>,
    /// Report file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompleteArgs {
    u1: PathBuf,
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true, default_value = "+1")]
    sign: Sign,
    /// One λ' per eigenvalue pair as `re,im;re,im;...` (all 1 by default).
    #[arg(long, allow_hyphen_values = true)]
    lambda_primes: Option<String>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Directory for u2.json, u3.json, triple.json and verdict.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ViolateArgs {
    /// Catalog name or a triple JSON file.
    source: String,
    #[arg(long, default_value_t = 50)]
    pure: usize,
    #[arg(long, default_value_t = 20)]
    mixed: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Residual accepted for the input triple.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Directory for summary.json and states.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[arg(value_enum)]
    kind: BoundKind,
    #[arg(long, default_value_t = DEFAULT_STARTS)]
    starts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Gradient-norm stopping tolerance for the phase ascent.
    #[arg(long, default_value_t = DEFAULT_GRADIENT_TOL)]
    tol: f64,
    /// Certificate file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CatalogArgs {
    /// pauli, spin:<two_s>, parity:<blocks>, weyl:<d> or fock:<re1>,<im1>,<re2>,<im2>,<cutoff>
    name: String,
    /// Directory for triple.json and u1.json, u2.json, u3.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BoundKind {
    Dichotomic,
    Phase,
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    match s.trim() {
        "+1" | "1" | "+" => Ok(Sign::Plus),
        "-1" | "-" => Ok(Sign::Minus),
        other => Err(format!("sign must be +1 or -1, got {other:?}")),
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("CONTEXTLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::parse(format!("CONTEXTLAB_THREADS must be a positive integer, got {raw:?}")))?;
    if n == 0 {
        return Err(CliError::parse("CONTEXTLAB_THREADS must be at least 1"));
    }
    contextlab::par::configure_threads(n);
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Verify(a) => commands::verify(&a.u1, &a.u2, &a.u3, a.tol, a.sign, a.out.as_deref()),
        Command::Complete(a) => commands::complete(&a.u1, a.lambda_primes.as_deref(), a.sign, a.tol, a.out.as_deref()),
        Command::Violate(a) => commands::violate(&a.source, a.pure, a.mixed, a.seed, a.tol, a.format, a.out.as_deref()),
        Command::Bound(a) => commands::bound(a.kind, a.starts, a.seed, a.tol, a.out.as_deref()),
        Command::Catalog(a) => commands::catalog(&a.name, a.out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return CliError::parse(e.kind().to_string()).report();
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}

//! `qnahm`: verify catalogued q-series identities, expand expressions, drive
//! the Bailey pair toolbox and run the numeric modular checks.
//!
//! Exit codes:
//!
//! ```text
//! 0  every requested check passed
//! 1  at least one check failed (or could not be evaluated)
//! 2  unknown identity / pair, or malformed input
//! 3  an enumeration bound certificate failed
//! ```

/// `println!` that stops quietly when the reader has gone away.
macro_rules! say {
    ($($t:tt)*) => { $crate::write_line(format_args!($($t)*)) };
}

mod bailey;
mod config;
mod expand;
mod modular;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use qnahm::series::rational::parse_exponent;
use qnahm::{Error, Exponent};

/// Exit code: all checks passed.
pub const EXIT_PASS: u8 = 0;
/// Exit code: some check failed.
pub const EXIT_FAIL: u8 = 1;
/// Exit code: unknown id or pair, or bad input.
pub const EXIT_INPUT: u8 = 2;
/// Exit code: an enumeration bound certificate failed.
pub const EXIT_CERTIFICATE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "qnahm", version, about = "Exact q-series identity checker for Nahm sums and Bailey pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify catalog identities by exact expansion of both sides.
    Verify(VerifyArgs),
    /// Expand an expression to a truncated series.
    Expand(ExpandArgs),
    /// List, verify or derive Bailey pairs.
    Bailey(BaileyArgs),
    /// Numeric modular transformation checks.
    Modular(ModularArgs),
    /// Print the dual of a Nahm quadruple given as JSON.
    Dual(DualArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("select").required(true).args(["id", "all", "filter"])))]
pub struct VerifyArgs {
    /// Identity id or unique anchor label (repeatable).
    #[arg(long)]
    pub id: Vec<String>,
    /// Every record of the catalog.
    #[arg(long)]
    pub all: bool,
    /// Records whose id starts with this prefix.
    #[arg(long, value_name = "PREFIX")]
    pub filter: Option<String>,
    /// q-validity order, integer or "p/q"; defaults to each record's own.
    #[arg(long, value_parser = parse_order)]
    pub order: Option<Exponent>,
    /// x-order for bivariate records.
    #[arg(long, value_parser = clap::value_parser!(i64).range(0..))]
    pub x_order: Option<i64>,
    /// Worker threads (default: all cores).
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,
    /// JSON file overriding per-record default orders.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ExpandArgs {
    /// Expression in the catalog grammar.
    #[arg(long)]
    pub expr: String,
    /// q-validity order, integer or "p/q".
    #[arg(long, value_parser = parse_order)]
    pub order: Exponent,
    /// x-order, needed when the expression involves x.
    #[arg(long, value_parser = clap::value_parser!(i64).range(0..))]
    pub x_order: Option<i64>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("action").required(true).args(["list", "verify", "chain"])))]
pub struct BaileyArgs {
    /// List registry pairs, derivations and transforms.
    #[arg(long)]
    pub list: bool,
    /// Check the defining relation of a registry pair.
    #[arg(long, value_name = "PAIR")]
    pub verify: Option<String>,
    /// A derivation name (L22, L23, L24) or a pipeline `PAIR>transform>...`.
    #[arg(long, value_name = "CHAIN")]
    pub chain: Option<String>,
    /// Largest index checked (default 20, or 10 for named derivations).
    #[arg(long)]
    pub n_max: Option<usize>,
    /// q-validity order.
    #[arg(long, value_parser = parse_order, default_value = "60")]
    pub order: Exponent,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("where").required(true).args(["tau", "suite"])))]
pub struct ModularArgs {
    /// Point of the upper half-plane, e.g. `i`, `1/4+i`, `-1/3+3/2i`.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    /// Every check at the fixed sample points.
    #[arg(long)]
    pub suite: bool,
    /// Residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct DualArgs {
    /// JSON file `{A, b, c, d}` with rational entries as strings.
    #[arg(long, value_name = "FILE")]
    pub quad: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

fn parse_order(s: &str) -> Result<Exponent, String> {
    let e = parse_exponent(s).map_err(|e| e.to_string())?;
    if e < Exponent::from_integer(1) {
        return Err(format!("order must be at least 1, got {s}"));
    }
    Ok(e)
}

/// Exit code for an engine error that aborted a command.
pub fn error_code(e: &Error) -> u8 {
    match e {
        Error::BoundCertificate(_) => EXIT_CERTIFICATE,
        _ => EXIT_INPUT,
    }
}

pub fn write_line(args: std::fmt::Arguments) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_fmt(args).and_then(|()| out.write_all(b"\n")) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: cannot write output: {e}");
        }
    }
}

/// Write `value` as pretty JSON on stdout.
pub fn print_json<T: serde::Serialize>(value: &T) -> anyhow::Result<()> {
    say!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Verify(a) => verify::run(&a),
        Command::Expand(a) => expand::run(&a),
        Command::Bailey(a) => bailey::run(&a),
        Command::Modular(a) => modular::run(&a),
        Command::Dual(a) => expand::dual(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Error>().map_or(EXIT_INPUT, error_code);
            ExitCode::from(code)
        }
    }
}

//! Audit and report generator for prime product coverage in unit groups.
//!
//! Exit codes: 0 pass, 1 mathematical mismatch, 2 resource or scan limit,
//! 3 configuration error.

mod audit;
mod config;
mod selftest;
mod table;

use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

pub const CODE_MISMATCH: i32 = 1;
pub const CODE_LIMIT: i32 = 2;
pub const CODE_CONFIG: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(message: String) -> CliError {
        CliError { code: CODE_CONFIG, message }
    }
}

impl From<primecover_core::Error> for CliError {
    fn from(err: primecover_core::Error) -> CliError {
        let code = match err {
            primecover_core::Error::LimitExceeded(_) | primecover_core::Error::SizeLimit(_) => {
                CODE_LIMIT
            }
            primecover_core::Error::Domain(_)
            | primecover_core::Error::UnsupportedModulus(_) => CODE_CONFIG,
            _ => CODE_MISMATCH,
        };
        CliError { code, message: err.to_string() }
    }
}

#[derive(Parser)]
#[command(name = "primecover", version, about = "Prime product coverage audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the exceptional-set size table and diff it against the embedded
    /// reference; exit 1 on any mismatch with the reference rows
    Table(TableArgs),
    /// Run a batch audit over a modulus range
    Audit(AuditArgs),
    /// Exhaustive small-group invariant suites and oracle cross-checks
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct TableArgs {
    /// Largest modulus to search
    #[arg(long)]
    ell_max: u64,
    /// Output format: csv | json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Write the table here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    /// Audit kind: cover | t1 | p2 | density | convolution | trouble-indices
    kind: Option<String>,
    /// Flat key=value config file; flags given here override file values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    q_lo: Option<u64>,
    #[arg(long)]
    q_hi: Option<u64>,
    /// Number of prime factors in the product (cover audits)
    #[arg(long)]
    k: Option<u32>,
    /// Literal prime bound y (cover) or subgroup index Y (t1/p2/convolution)
    #[arg(long)]
    y: Option<u64>,
    /// Rational exponent NUM/DEN; bounds become ceil(q^(NUM/DEN))
    #[arg(long)]
    exponent: Option<String>,
    #[arg(long)]
    ell_max: Option<u64>,
    /// Largest index for trouble-index reports
    #[arg(long)]
    y0: Option<u64>,
    /// Density threshold NUM/DEN for trouble-index reports
    #[arg(long)]
    eta: Option<String>,
    /// Kind-specific mode: iwa|mika (density), squarefree (p2),
    /// strict|nonstrict (trouble-indices)
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: json | csv
    #[arg(long)]
    format: Option<String>,
    /// Worker threads; output is byte-identical at any setting
    #[arg(long)]
    jobs: Option<usize>,
    /// Scan ceiling override
    #[arg(long)]
    ceiling: Option<u64>,
    /// Convolution cutoff x
    #[arg(long)]
    x: Option<u64>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Corrupt an internal computation to exercise the failure path
    /// (supported: kneser)
    #[arg(long)]
    inject_fault: Option<String>,
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

fn audit_config(args: &AuditArgs) -> Result<RunConfig, CliError> {
    let file_cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse_kv(&text).map_err(CliError::config)?
        }
        None => RunConfig::default(),
    };
    let flag_cfg = RunConfig {
        kind: args.kind.clone(),
        q_lo: args.q_lo,
        q_hi: args.q_hi,
        k: args.k,
        y: args.y,
        exponent: audit::rational_flag(&args.exponent)?,
        ell_max: args.ell_max,
        y0: args.y0,
        eta: audit::rational_flag(&args.eta)?,
        mode: args.mode.clone(),
        out: args.out.as_ref().map(|p| p.display().to_string()),
        format: args.format.clone(),
        jobs: args.jobs,
        ceiling: args.ceiling,
        x: args.x,
    };
    Ok(file_cfg.merged_with(&flag_cfg))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Table(args) => {
            let outcome = table::run(args.ell_max, &args.format)?;
            write_output(&args.out, &outcome.output)?;
            for diff in &outcome.diffs {
                eprintln!("table diff: {diff}");
            }
            Ok(outcome.exit)
        }
        Command::Audit(args) => {
            let cfg = audit_config(&args)?;
            let outcome = audit::run(&cfg)?;
            let out = cfg.out.as_ref().map(PathBuf::from);
            write_output(&out, &outcome.output)?;
            Ok(outcome.exit)
        }
        Command::Selftest(args) => {
            let outcome = selftest::run(args.inject_fault.as_deref())?;
            write_output(&None, &outcome.output)?;
            Ok(outcome.exit)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                err.print().ok();
                return ExitCode::SUCCESS;
            }
            eprintln!("{err}");
            return ExitCode::from(CODE_CONFIG as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}

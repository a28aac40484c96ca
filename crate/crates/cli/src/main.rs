//! `qtheta`: verify q-series identities from the command line.
//!
//! Exit status: 0 when every requested check passes, 1 when at least one
//! check fails or errors (reports are still written), 2 on usage, parse or
//! I/O errors.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qtheta_core::catalog::{self, VerificationReport};
use qtheta_core::dsl;

use report::Format;

const FALLBACK_ORDER: i64 = 20;

#[derive(Parser, Debug)]
#[command(name = "qtheta", version, about = "Exact verification of q-series identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OrderArg {
    /// Check through q^ORDER (a real exponent, whatever the denominator).
    #[arg(long, env = "QTHETA_DEFAULT_ORDER", value_parser = clap::value_parser!(i64).range(0..))]
    order: Option<i64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the identities in the catalog.
    List {
        #[command(flatten)]
        output: Output,
    },
    /// Verify catalog identities by id.
    Verify {
        #[arg(required = true)]
        ids: Vec<String>,
        #[command(flatten)]
        order: OrderArg,
        #[command(flatten)]
        output: Output,
    },
    /// Verify the whole catalog in parallel.
    VerifyAll {
        /// Multiply every default order by this factor.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Worker threads (default: all cores).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Expand an expression and print its coefficients, one
    /// `e/D<TAB>a<TAB>b` line per term.
    Expand {
        expr: String,
        #[command(flatten)]
        order: OrderArg,
        /// Display denominator (a multiple of the series denominator).
        #[arg(long)]
        den: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two expressions.
    Check {
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[command(flatten)]
        order: OrderArg,
        #[command(flatten)]
        output: Output,
    },
}

/// Failure that maps to exit status 2.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn write_out(text: &str, out: &Option<PathBuf>) -> Result<(), UsageError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| UsageError(format!("cannot write {}: {}", p.display(), e))),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn finish(reports: &[VerificationReport], output: &Output) -> Result<bool, UsageError> {
    write_out(&report::emit_reports(reports, output.format), &output.out)?;
    Ok(report::all_pass(reports))
}

fn run(cli: Cli) -> Result<bool, UsageError> {
    match cli.command {
        Command::List { output } => {
            write_out(&report::emit_cases(catalog::list(), output.format), &output.out)?;
            Ok(true)
        }
        Command::Verify { ids, order, output } => {
            let reports = ids
                .iter()
                .map(|id| catalog::verify(id, order.order))
                .collect::<Result<Vec<_>, _>>()?;
            finish(&reports, &output)
        }
        Command::VerifyAll { scale, jobs, output } => {
            let reports = catalog::verify_all(Some(scale), jobs.map(|j| j as usize))?;
            finish(&reports, &output)
        }
        Command::Expand { expr, order, den, out } => {
            let s = dsl::eval_str(&expr, order.order.unwrap_or(FALLBACK_ORDER))?;
            write_out(&s.dump(den)?, &out)?;
            Ok(true)
        }
        Command::Check {
            lhs,
            rhs,
            order,
            output,
        } => {
            let r = dsl::check(&lhs, &rhs, order.order.unwrap_or(FALLBACK_ORDER))?;
            finish(&[r], &output)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}

//! `metallic-geo` — numerical verification of optimal curvature bounds for
//! submanifolds of metallic product space forms M₁(c₁) × M₂(c₂).
//!
//! Every subcommand emits one JSON report (schema `metallic-geo/1`) to
//! stdout or `--out`.  Exit status: 0 all bounds hold, 1 at least one bound
//! was falsified beyond the slack tolerance, 2 invalid configuration or
//! arguments, 3 no grid point produced a valid result.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{
    cmd_check_derivation, cmd_examples, cmd_invariants, cmd_oracles, cmd_verify, OracleParams,
    Outcome,
};
use config::{parse_theorem_list, resolve, CliError, Overrides, ResolvedCase};
use report::Report;

#[derive(Parser)]
#[command(
    name = "metallic-geo",
    version,
    about = "Curvature invariants and optimal inequality verification on \
             submanifolds of metallic product space forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate curvature and slant invariants over a parameter grid.
    Invariants(CaseArgs),
    /// Verify the optimal curvature bounds over a parameter grid.
    Verify(CaseArgs),
    /// Run the algebraic oracle batteries (component DDVV inequality and the
    /// quadratic lemma) on seeded random input.
    Oracles(OracleArgs),
    /// Compare the closed-form scalar-curvature assembly against direct
    /// Gauss-equation sums under every interpretation of tr²φ and the
    /// curvature sign.
    CheckDerivation(CaseArgs),
    /// List the built-in example cases and their expected outcomes.
    Examples(OutArgs),
}

#[derive(Args)]
struct CaseArgs {
    /// Case source: a JSON config path, or builtin:NAME (see `examples`).
    #[arg(long)]
    config: String,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the optimizer seed (default 42 unless the config sets one).
    #[arg(long)]
    seed: Option<u64>,
    /// Override the optimizer restart count (default 64).
    #[arg(long)]
    restarts: Option<usize>,
    /// Override the falsification slack tolerance (default 1e-7).
    #[arg(long)]
    tol: Option<f64>,
    /// Restrict verification to a comma-separated theorem subset
    /// (wintgen, chen-delta, shape-ricci, mean-scalar, casorati).
    #[arg(long, value_delimiter = ',')]
    ineq: Vec<String>,
}

#[derive(Args)]
struct OracleArgs {
    /// Seed for the random batteries.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of random shape-operator tuples for the DDVV battery.
    #[arg(long, default_value_t = 100_000)]
    ddvv_samples: usize,
    /// Number of random constrained tuples for the quadratic-lemma battery.
    #[arg(long, default_value_t = 1_000_000)]
    chen_samples: usize,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OutArgs {
    /// Write the JSON report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((report, outcome, out)) => match deliver(&report, out.as_deref()) {
            Ok(()) => ExitCode::from(outcome.code() as u8),
            Err(err) => {
                eprintln!("{err}");
                ExitCode::from(2)
            }
        },
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(Report, Outcome, Option<PathBuf>), CliError> {
    match command {
        Command::Invariants(args) => {
            let case = resolve_case(&args)?;
            let (report, outcome) = cmd_invariants(&case)?;
            Ok((report, outcome, args.out))
        }
        Command::Verify(args) => {
            let case = resolve_case(&args)?;
            let (report, outcome) = cmd_verify(&case)?;
            Ok((report, outcome, args.out))
        }
        Command::CheckDerivation(args) => {
            let case = resolve_case(&args)?;
            let (report, outcome) = cmd_check_derivation(&case)?;
            Ok((report, outcome, args.out))
        }
        Command::Oracles(args) => {
            let params = OracleParams {
                seed: args.seed,
                ddvv_samples: args.ddvv_samples,
                chen_samples: args.chen_samples,
            };
            let (report, outcome) = cmd_oracles(&params);
            Ok((report, outcome, args.out))
        }
        Command::Examples(args) => {
            let (report, outcome) = cmd_examples()?;
            Ok((report, outcome, args.out))
        }
    }
}

fn resolve_case(args: &CaseArgs) -> Result<ResolvedCase, CliError> {
    let theorems = if args.ineq.is_empty() {
        None
    } else {
        Some(parse_theorem_list(&args.ineq)?)
    };
    let overrides = Overrides {
        seed: args.seed,
        restarts: args.restarts,
        tol: args.tol,
        theorems,
    };
    resolve(&args.config, &overrides)
}

fn deliver(report: &Report, out: Option<&std::path::Path>) -> Result<(), CliError> {
    let text = report.emit();
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `METALLIC_GEO_THREADS` caps the sweep worker count; report bytes do not
/// depend on it because points are collected in index order.
fn init_thread_pool() {
    if let Ok(value) = std::env::var("METALLIC_GEO_THREADS") {
        match value.parse::<usize>() {
            Ok(threads) if threads >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
            _ => eprintln!("METALLIC_GEO_THREADS={value:?} is not a positive integer; ignored"),
        }
    }
}

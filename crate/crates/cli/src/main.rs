use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pathsys_cli::report::Report;
use pathsys_cli::{engines, exit_code, InputError, PaleyOptions, EXIT_INPUT};
use pathsys_core::audit::DEFAULT_SEED;
use pathsys_core::metrizability::DEFAULT_SOLVER;
use pathsys_core::reducibility::DEFAULT_SEARCH;

#[derive(Parser)]
#[command(name = "pathsys", version, about = "Verify path systems on Paley graphs")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Args)]
struct EngineArgs {
    /// Feasibility solver: farkas-dual or bounded-primal.
    #[arg(long, default_value = DEFAULT_SOLVER)]
    solver: String,
    /// Reduction search strategy: propagate or enumerate.
    #[arg(long, default_value = DEFAULT_SEARCH)]
    search: String,
    /// Branch budget for the reduction search.
    #[arg(long, default_value_t = 100_000_000)]
    budget: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Paley path system for one admissible prime.
    PaleyVerify {
        #[arg(long)]
        prime: u64,
        /// Also solve the full edge-weight system.
        #[arg(long)]
        direct_lp: bool,
        /// Also search exhaustively for a reduction.
        #[arg(long)]
        search_reduction: bool,
        #[command(flatten)]
        engines: EngineArgs,
    },
    /// Check a path system read from a `pathsystem v1` file.
    Check {
        #[arg(long)]
        input: PathBuf,
        /// Write the metrizability system and its witness or certificate here.
        #[arg(long)]
        dump_certificate: Option<PathBuf>,
        #[command(flatten)]
        engines: EngineArgs,
    },
    /// Check the number-theoretic bounds for all primes up to a limit.
    Audit {
        #[arg(long)]
        max: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn run(cli: Cli, echo: String) -> Result<Report, InputError> {
    match cli.command {
        Command::PaleyVerify {
            prime,
            direct_lp,
            search_reduction,
            engines: e,
        } => pathsys_cli::paley_verify(
            echo,
            prime,
            &PaleyOptions {
                direct_lp,
                search_reduction,
            },
            engines(&e.solver, &e.search, e.budget)?,
        ),
        Command::Check {
            input,
            dump_certificate,
            engines: e,
        } => pathsys_cli::check(
            echo,
            &input,
            dump_certificate.as_deref(),
            engines(&e.solver, &e.search, e.budget)?,
        ),
        Command::Audit { max, seed, csv } => pathsys_cli::audit(echo, max, seed, csv.as_deref()),
    }
}

fn main() -> ExitCode {
    let echo = std::env::args().collect::<Vec<_>>().join(" ");
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli, echo) {
        Ok(report) => {
            match format {
                Format::Text => print!("{}", report.to_text()),
                Format::Structured => println!("{}", report.to_json()),
            }
            ExitCode::from(exit_code(&report) as u8)
        }
        Err(InputError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}

use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use partmax_cli::{CliError, Overrides, Vary};

#[derive(Parser)]
#[command(
    name = "partmax",
    version,
    about = "Non-submodular maximization under partition matroids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the selected algorithms on one (b, k) and emit one CSV row per repetition
    Run(Overrides),
    /// Sweep b or k and write solution.csv and query.csv
    Sweep {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, value_enum)]
        vary: Vary,
        /// Comma-separated integers
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<usize>,
    },
    /// Print γ′, α′ and the approximation ratios
    Bounds {
        #[command(flatten)]
        overrides: Overrides,
        /// Enumerate the exact parameters instead of the app bound
        #[arg(long)]
        exact: bool,
    },
    /// Exact γ and α by enumeration (small instances only)
    Quantify(Overrides),
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(o) => partmax_cli::run(&o.resolve()?).map(drop),
        Command::Sweep {
            overrides,
            vary,
            values,
        } => partmax_cli::sweep(&overrides.resolve()?, vary, &values).map(drop),
        Command::Bounds { overrides, exact } => {
            partmax_cli::bounds(&overrides.resolve_for_bounds()?, exact).map(drop)
        }
        Command::Quantify(o) => partmax_cli::quantify(&o.resolve_for_bounds()?).map(drop),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli).context("partmax failed") {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = err
                .downcast_ref::<CliError>()
                .map_or(1, CliError::exit_code);
            let category = err
                .downcast_ref::<CliError>()
                .map_or("internal", CliError::category);
            eprintln!("error[{category}]: {:#}", err);
            ExitCode::from(code as u8)
        }
    }
}

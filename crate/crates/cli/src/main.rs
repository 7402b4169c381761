//! Command-line workbench for two-mode Gaussian light correlations and
//! ghost-imaging SNR studies.
//!
//! Exit codes: 0 success, 1 validation/consistency failure, 2 bad input.

mod commands;
mod config;

use clap::{Parser, Subcommand};

use commands::{
    cmd_correlations, cmd_figure, cmd_lensless, cmd_simulate, cmd_validate, CorrelationsArgs,
    FigureArgs, LenslessArgs, SimulateArgs, ValidateArgs,
};

#[derive(Parser)]
#[command(
    name = "ghostcorr",
    version,
    about = "Quantum/classical correlation analysis and SNR models for ghost imaging"
)]
struct Cli {
    /// Worker threads for sweeps and simulations (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correlations (Q, C, T) of a source covariance matrix
    Correlations(CorrelationsArgs),
    /// Emit figure-reproduction data grids
    Figure(FigureArgs),
    /// Monte Carlo simulation of lensed ghost imaging
    Simulate(SimulateArgs),
    /// Lensless propagation model: field correlations and area scaling
    Lensless(LenslessArgs),
    /// Run the invariant validation suite
    Validate(ValidateArgs),
}

fn dispatch(command: &Command) -> anyhow::Result<i32> {
    match command {
        Command::Correlations(args) => cmd_correlations(args),
        Command::Figure(args) => cmd_figure(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Lensless(args) => cmd_lensless(args),
        Command::Validate(args) => cmd_validate(args),
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(anyhow::Error::from)
            .and_then(|pool| pool.install(|| dispatch(&cli.command))),
        None => dispatch(&cli.command),
    };
    let code = match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

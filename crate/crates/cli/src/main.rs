mod commands;
mod config;

use clap::{Parser, Subcommand};
use commands::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Pseudospherical surfaces from characteristic Cauchy data: loop-group
/// builds, singularity classification, family sweeps, verification.
#[derive(Parser)]
#[command(name = "loopfront", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a surface: mesh, sigma CSV, singular contours, base-point report.
    Build {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Sweep the [family] parameter; one surface per value plus an events CSV.
    Family {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Classify a harmonic jet given directly on the command line.
    Classify {
        /// Rational coefficients, `ax;ay;bx;by` with comma-separated groups,
        /// or one flat comma list in that order.
        #[arg(long)]
        jet: String,
        /// Also report the A-class of the Gauss map germ.
        #[arg(long)]
        gauss: bool,
    },
    /// Build and run the numerical certificate checks; exit 5 on failure.
    Verify {
        #[arg(short, long)]
        config: PathBuf,
    },
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("LOOPFRONT_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| {
        CliError::Config(format!("LOOPFRONT_THREADS: `{v}` is not a thread count"))
    })?;
    if n == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("LOOPFRONT_THREADS: {e}")))
}

fn run() -> Result<(), CliError> {
    init_threads()?;
    match Cli::parse().command {
        Command::Build { config } => commands::cmd_build(&config),
        Command::Family { config } => commands::cmd_family(&config),
        Command::Classify { jet, gauss } => commands::cmd_classify(&jet, gauss),
        Command::Verify { config } => commands::cmd_verify(&config),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

//! `polcirc`: run GKLS evolutions, polariser interactions, gate-assisted
//! geodesic circuits, accuracy sweeps and the verification suites.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Args, Parser, Subcommand};

mod commands;
mod config;
mod svg;

use commands::{EvolveArgs, Globals};
use config::UsageError;

#[derive(Parser)]
#[command(name = "polcirc", version, about, long_about = None)]
struct Cli {
    #[command(flatten)]
    globals: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// TOML experiment file
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Integration step
    #[arg(long, global = true)]
    dt: Option<f64>,

    /// Circuit accuracy
    #[arg(long, global = true)]
    epsilon: Option<f64>,

    /// Accuracy grid as lo:hi:count[:log|lin]
    #[arg(long, global = true, value_name = "GRID")]
    eps_grid: Option<String>,

    /// Reference/target preset: a, b, c or d
    #[arg(long, global = true)]
    example: Option<String>,

    /// Seed for the randomized verification suites
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the GKLS system and write the trajectory
    Evolve {
        /// End of the integration window
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        energy: Option<f64>,
    },
    /// Apply one polariser interaction to a light state
    Gate,
    /// Track a geodesic with polariser gates at one accuracy
    Circuit,
    /// Count gates over a grid of accuracies and fit the power law
    Sweep,
    /// Run the oracle cross-checks
    Verify {
        /// Use this tolerance for every check
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let a = cli.globals;
    let g = Globals {
        config: a.config,
        out: a.out,
        dt: a.dt,
        epsilon: a.epsilon,
        eps_grid: a.eps_grid,
        example: a.example,
        seed: a.seed,
    };
    let result = match cli.command {
        Command::Evolve { t_end, alpha, beta, energy } => {
            commands::evolve(&g, &EvolveArgs { t_end, alpha, beta, energy })
        }
        Command::Gate => commands::gate(&g),
        Command::Circuit => commands::circuit(&g),
        Command::Sweep => commands::sweep(&g),
        Command::Verify { tolerance } => commands::verify(&g, tolerance),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

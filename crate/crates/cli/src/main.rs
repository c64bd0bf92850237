mod commands;
mod config;
mod error;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::parse_config;
use error::{CliError, ErrorRecord};

#[derive(Parser)]
#[command(name = "hodowave", about = "Steady water waves with vorticity in hodograph variables")]
struct Cli {
    /// JSON config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. --set gamma=[-0.1] or --set bracket.lo=0.2.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (overrides the config's `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Laminar profile at the bifurcation point and the dispersion scan.
    Laminar,
    /// Bifurcation point λ*, depth and speed.
    Bifurcate,
    /// Amplitude continuation; h and frame per solution.
    Solve,
    /// Particle trajectories, streamlines and the drift profile.
    Trace,
    /// Verification report of the largest wave; exit 4 on failure.
    Verify,
    /// SVG figures.
    Plot,
    /// Solve and verify for each vorticity in `sweep`.
    Sweep,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = parse_config(cli.config.as_deref(), &cli.overrides, cli.out.as_deref())?;
    std::fs::create_dir_all(&cfg.out)?;
    commands::write_json(&cfg.out.join("effective_config.json"), &cfg)?;
    match cli.command {
        Command::Laminar => commands::laminar(&cfg),
        Command::Bifurcate => commands::bifurcate(&cfg),
        Command::Solve => commands::solve(&cfg),
        Command::Trace => commands::trace(&cfg),
        Command::Verify => commands::verify(&cfg),
        Command::Plot => commands::plot(&cfg),
        Command::Sweep => commands::sweep(&cfg),
    }
}

/// Where error.json goes when the config never parsed.
fn fallback_out(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hodowave: {e}");
            let out = parse_config(cli.config.as_deref(), &cli.overrides, cli.out.as_deref())
                .map(|c| c.out)
                .unwrap_or_else(|_| fallback_out(&cli));
            let _ = std::fs::create_dir_all(&out)
                .map_err(CliError::from)
                .and_then(|_| commands::write_json(&out.join("error.json"), &ErrorRecord::from(&e)));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

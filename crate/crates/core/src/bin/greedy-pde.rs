use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use greedy_pde::experiments::{run, ExperimentConfig, PRESETS};
use greedy_pde::Error;

#[derive(Parser)]
#[command(version, about = "Greedy neural-network solvers for PDE benchmark presets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset and write `<preset>.csv` and `<preset>.txt`.
    Run {
        preset: String,
        /// Comma-separated neuron counts, e.g. `16,32,64`.
        #[arg(long, value_delimiter = ',')]
        n_schedule: Option<Vec<usize>>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: $GREEDY_PDE_OUT or `.`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON file with configuration overrides.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Use the full-size schedules and quadrature.
        #[arg(long)]
        full_scale: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let Command::Run { preset, n_schedule, seed, out, config, full_scale } = Cli::parse().command;
    match execute(&preset, n_schedule, seed, out, config, full_scale) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::UnknownPreset(_)) => {
            eprintln!("error: {e}; known presets: {}", PRESETS.join(", "));
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(
    preset: &str,
    n_schedule: Option<Vec<usize>>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    config: Option<PathBuf>,
    full_scale: bool,
) -> Result<(), Error> {
    let mut c = match &config {
        Some(path) => ExperimentConfig::from_json_file(path, Some(preset))?,
        None if full_scale => ExperimentConfig::full_scale(preset)?,
        None => ExperimentConfig::preset(preset)?,
    };
    if full_scale && !c.full_scale {
        let scaled = ExperimentConfig::full_scale(preset)?;
        c.schedule = scaled.schedule;
        c.quadrature = scaled.quadrature;
        c.full_scale = true;
    }
    if let Some(s) = n_schedule {
        c.schedule = s;
    }
    if let Some(s) = seed {
        c.seed = s;
    }
    c.validate()?;
    let dir = out
        .or_else(|| std::env::var_os("GREEDY_PDE_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let report = run(&c)?;
    print!("{}", report.to_text());
    for p in report.write(&dir, preset)? {
        log::info!("wrote {}", p.display());
    }
    Ok(())
}

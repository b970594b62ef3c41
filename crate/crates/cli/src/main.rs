mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use tracing_subscriber::EnvFilter;

use commands::Failure;

/// Shown under every subcommand's flags.
pub(crate) const SETTING_RANGES: &str = "\
Setting ranges:
  bokeh      blur strength K, 1 to 30
  focal      focal length, 24 to 70 mm
  shutter    shutter time, 0.1 to 1.0 (0.2 is the base exposure)
  colortemp  color temperature, 2000 to 10000 K";

#[derive(Parser)]
#[command(name = "camsim", version, about = "Camera intrinsics simulation and contrastive dataset tools")]
struct Cli {
    /// Worker threads (defaults to the number of CPUs)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Log filter, e.g. "info" or "camsim=debug"; RUST_LOG is used when unset
    #[arg(long, global = true)]
    log_level: Option<String>,

    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Render one camera setting from a base image
    #[command(after_help = SETTING_RANGES)]
    Simulate(commands::simulate::SimulateArgs),
    /// Draw a set of setting values
    #[command(after_help = SETTING_RANGES)]
    Sample(commands::sample::SampleArgs),
    /// Build contrastive frame sets from a directory of base images
    #[command(name = "build-dataset", after_help = SETTING_RANGES)]
    BuildDataset(commands::build::BuildArgs),
    /// Write the coarse camera embedding of a setting set
    #[command(after_help = SETTING_RANGES)]
    Embed(commands::embed::EmbedArgs),
    /// Score generated frames against a reference
    #[command(after_help = SETTING_RANGES)]
    Eval(commands::eval::EvalArgs),
    /// Draw generated vs reference trends from an evaluation report
    #[command(after_help = SETTING_RANGES)]
    Plot(commands::plot::PlotArgs),
}

fn init_logging(level: Option<&str>) {
    let filter = match level {
        Some(l) => EnvFilter::new(l),
        None => EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")),
    };
    let _ = tracing_subscriber::fmt()
        .json()
        .flatten_event(true)
        .with_current_span(false)
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .try_init();
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match cli.command {
        Commands::Simulate(args) => commands::simulate::run(args),
        Commands::Sample(args) => commands::sample::run(args),
        Commands::BuildDataset(args) => commands::build::run(args),
        Commands::Embed(args) => commands::embed::run(args),
        Commands::Eval(args) => commands::eval::run(args),
        Commands::Plot(args) => commands::plot::run(args),
    }
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
    init_logging(cli.log_level.as_deref());
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            tracing::error!(error = %e, "command failed");
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

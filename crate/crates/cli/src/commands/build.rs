use std::path::PathBuf;

use camsim::config::GatePolicy;
use camsim::dataset::{build_dataset, list_base_images, BuildOptions, CaptionChain, MANIFEST_FILE};
use camsim::SettingKind;
use clap::Args;

use super::{load_config, parse_kind, Failure};

#[derive(Args)]
pub struct BuildArgs {
    /// Setting that varies within each set: bokeh, focal, shutter or colortemp
    #[arg(long, value_parser = parse_kind)]
    task: SettingKind,

    /// Directory of base PNG images (with optional caption and depth sidecars)
    #[arg(long)]
    input: PathBuf,

    /// Frames per set (at least 2)
    #[arg(long, default_value_t = 5)]
    frames: usize,

    /// Number of sets; base images are reused in order when fewer
    #[arg(long)]
    count: usize,

    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output directory for frames and manifest.json
    #[arg(long)]
    out: PathBuf,

    /// Fail on the first base image that does not pass its quality gate
    #[arg(long)]
    strict: bool,

    /// Captioning service URL (overrides config and environment)
    #[arg(long)]
    captioner: Option<String>,

    /// JSON config file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run(args: BuildArgs) -> Result<(), Failure> {
    if args.frames < 2 {
        return Err(Failure::Usage(format!("--frames must be at least 2, got {}", args.frames)));
    }
    let mut config = load_config(args.config.as_deref())?;
    if args.strict {
        config.quality_gates.policy = GatePolicy::Strict;
    }
    if let Some(url) = args.captioner {
        config.captioner.endpoint = Some(url);
    }
    let bases = list_base_images(&args.input)?;
    let captions = CaptionChain::from_config(&config.captioner);
    let opts = BuildOptions {
        kind: args.task,
        frames: args.frames,
        count: args.count,
        seed: args.seed,
    };
    let manifest = build_dataset(&bases, &opts, &config, &captions, &args.out)?;
    let summary = serde_json::json!({
        "manifest": args.out.join(MANIFEST_FILE),
        "sets": manifest.sets.len(),
        "skipped": manifest.skipped.len(),
    });
    println!("{summary}");
    Ok(())
}

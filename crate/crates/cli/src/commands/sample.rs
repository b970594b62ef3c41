use camsim::dataset::format_set_label;
use camsim::sampler::{discretize_setting_set, sample_setting_set};
use camsim::SettingKind;
use clap::Args;

use super::{parse_kind, Failure};

#[derive(Args)]
pub struct SampleArgs {
    /// Setting kind: bokeh, focal, shutter or colortemp
    #[arg(long, value_parser = parse_kind)]
    kind: SettingKind,

    /// Number of values (at least 2)
    #[arg(long)]
    frames: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Snap values to this many uniformly spaced grid points
    #[arg(long)]
    bins: Option<usize>,
}

/// Prints `{"kind", "seed", "values", "label"}` as one JSON line.
pub fn run(args: SampleArgs) -> Result<(), Failure> {
    if args.frames < 2 {
        return Err(Failure::Usage(format!("--frames must be at least 2, got {}", args.frames)));
    }
    let mut set = sample_setting_set(args.kind, args.frames, args.seed)?;
    if let Some(bins) = args.bins {
        if bins < 2 {
            return Err(Failure::Usage(format!("--bins must be at least 2, got {bins}")));
        }
        set = discretize_setting_set(&set, bins)?;
    }
    let out = serde_json::json!({
        "kind": set.kind(),
        "seed": set.seed(),
        "values": set.values(),
        "label": format_set_label(&set),
    });
    println!("{out}");
    Ok(())
}

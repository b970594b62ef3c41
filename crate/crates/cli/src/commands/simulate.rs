use std::path::PathBuf;

use camsim::simulate::{find_disparity_sidecar, load_disparity_sidecar, render_frame, Scene};
use camsim::{CameraSetting, ImagePlane, SettingKind};
use clap::Args;

use super::{check_value, load_config, parse_kind, Failure};

#[derive(Args)]
pub struct SimulateArgs {
    /// Setting to simulate: bokeh, focal, shutter or colortemp
    #[arg(long, value_parser = parse_kind)]
    task: SettingKind,

    /// Setting value (see ranges below)
    #[arg(long, allow_negative_numbers = true)]
    value: f64,

    /// Base image (8-bit PNG)
    #[arg(long)]
    input: PathBuf,

    /// Output PNG
    #[arg(long)]
    output: PathBuf,

    /// Disparity for bokeh: single-channel PNG or 1x1xHxW tensor file.
    /// Defaults to a <stem>.disparity.png / .disparity.cemb / .depth.png sidecar
    #[arg(long)]
    disparity: Option<PathBuf>,

    /// Disparity percentile used as the in-focus plane, 0 to 100
    #[arg(long)]
    focus_percentile: Option<f64>,

    /// Use the noisy sensor chain for shutter frames
    #[arg(long)]
    stochastic: bool,

    /// Seed for the stochastic sensor chain
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Focal output width in pixels (default: input width)
    #[arg(long)]
    width: Option<usize>,

    /// Focal output height in pixels (default: input height)
    #[arg(long)]
    height: Option<usize>,

    /// JSON config file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run(args: SimulateArgs) -> Result<(), Failure> {
    let value = check_value(args.task, args.value)?;
    let mut config = load_config(args.config.as_deref())?;
    if let Some(p) = args.focus_percentile {
        if !(0.0..=100.0).contains(&p) {
            return Err(Failure::Usage(format!("--focus-percentile {p} is outside [0, 100]")));
        }
        config.bokeh.focus_percentile = p;
    }
    if args.stochastic {
        config.exposure.stochastic = true;
    }
    if args.width.is_some() {
        config.focal.out_width = args.width;
    }
    if args.height.is_some() {
        config.focal.out_height = args.height;
    }
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;

    let image = ImagePlane::read_png(&args.input)?;
    let disparity = if args.task == SettingKind::Bokeh {
        let path = args
            .disparity
            .or_else(|| find_disparity_sidecar(&args.input))
            .ok_or_else(|| Failure::Usage("bokeh needs --disparity or a disparity sidecar".into()))?;
        Some(load_disparity_sidecar(&path, config.bokeh.depth_epsilon)?)
    } else {
        None
    };
    let scene = Scene::new(image, disparity);
    let setting = CameraSetting::new(args.task, value)?;
    let frame = render_frame(&scene, setting, &config, args.seed)?;
    frame.write_png(&args.output)?;
    tracing::info!(task = %args.task, value, output = %args.output.display(), "frame written");
    Ok(())
}

use std::path::PathBuf;

use camsim::metrics::{
    evaluate, load_frame_dir, ColorTempReduction, CommandMetric, CommandQuality, Dssim, EvalOptions, PerceptualMetric,
    QualityScorer, ReferenceSource,
};
use camsim::simulate::{find_disparity_sidecar, load_disparity_sidecar, Scene};
use camsim::{ImagePlane, SettingKind};
use clap::Args;

use super::{check_value, load_config, parse_kind, write_json, Failure};

#[derive(Args)]
pub struct EvalArgs {
    /// Setting kind; read from settings.json in the frame directory when omitted
    #[arg(long, value_parser = parse_kind)]
    task: Option<SettingKind>,

    /// Directory of generated frame_<i>.png files
    #[arg(long)]
    generated: PathBuf,

    /// Directory of reference frames
    #[arg(long, conflicts_with = "simulate", required_unless_present = "simulate")]
    reference: Option<PathBuf>,

    /// Simulate the reference from --base at the setting values
    #[arg(long, requires = "base")]
    simulate: bool,

    /// Base image for --simulate
    #[arg(long)]
    base: Option<PathBuf>,

    /// Disparity for a simulated bokeh reference (default: sidecar of --base)
    #[arg(long)]
    disparity: Option<PathBuf>,

    /// Comma-separated setting values, in frame order
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,

    /// Compare color temperature per channel instead of mean(B) - mean(R)
    #[arg(long)]
    per_channel: bool,

    /// External perceptual metric: run as `CMD [ARGS..] a.png b.png`, prints a distance
    #[arg(long)]
    metric_command: Option<PathBuf>,

    /// Extra argument for --metric-command (repeatable)
    #[arg(long, allow_hyphen_values = true)]
    metric_arg: Vec<String>,

    /// External quality scorer: run as `CMD [ARGS..] DIR`, prints a score
    #[arg(long)]
    quality_command: Option<PathBuf>,

    /// Extra argument for --quality-command (repeatable)
    #[arg(long, allow_hyphen_values = true)]
    quality_arg: Vec<String>,

    /// Seed for a stochastic simulated reference
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output report (JSON)
    #[arg(long)]
    report: PathBuf,

    /// JSON config file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run(args: EvalArgs) -> Result<(), Failure> {
    if let (Some(kind), Some(values)) = (args.task, &args.values) {
        for &v in values {
            check_value(kind, v)?;
        }
    }
    let config = load_config(args.config.as_deref())?;
    let reference = match (&args.reference, &args.base) {
        (Some(dir), _) => ReferenceSource::Frames(load_frame_dir(dir)?),
        (None, Some(base)) => {
            let image = ImagePlane::read_png(base)?;
            let disparity = match args.disparity.clone().or_else(|| find_disparity_sidecar(base)) {
                Some(p) => Some(load_disparity_sidecar(&p, config.bokeh.depth_epsilon)?),
                None => None,
            };
            ReferenceSource::Simulate {
                scene: Box::new(Scene::new(image, disparity)),
                config: config.clone(),
                seed: args.seed,
            }
        }
        (None, None) => return Err(Failure::Usage("pass --reference DIR or --simulate --base PATH".into())),
    };

    let metric: Box<dyn PerceptualMetric> = match args.metric_command {
        Some(program) => Box::new(CommandMetric {
            name: program.display().to_string(),
            program,
            args: args.metric_arg,
        }),
        None => Box::new(Dssim),
    };
    let quality = args.quality_command.map(|program| CommandQuality {
        name: program.display().to_string(),
        program,
        args: args.quality_arg,
    });
    let opts = EvalOptions {
        kind: args.task,
        values: args.values,
        metric: metric.as_ref(),
        reduction: if args.per_channel {
            ColorTempReduction::PerChannel
        } else {
            ColorTempReduction::BlueMinusRed
        },
        quality: quality.as_ref().map(|q| q as &dyn QualityScorer),
    };
    let report = evaluate(&args.generated, reference, &opts)?;
    write_json(&args.report, &report)?;
    let summary = serde_json::json!({
        "kind": report.kind,
        "accuracy_corrcoef": report.accuracy_corrcoef,
        "consistency": report.consistency,
        "reference_consistency": report.reference_consistency,
        "consistency_gap": report.consistency_gap,
        "quality": report.quality,
    });
    println!("{summary}");
    Ok(())
}

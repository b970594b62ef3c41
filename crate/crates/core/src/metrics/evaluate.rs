//! Scoring a generated frame set against a physically simulated reference.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde::{Deserialize, Serialize};

use super::perceptual::run_for_number;
use super::{
    consistency_score, measure_effect, trend_corrcoef_with, ColorTempReduction, EffectSeries, MeasureOptions,
    PerceptualMetric, SCALE_METHOD,
};
use crate::bokeh::background_mask;
use crate::bokeh::BACKGROUND_THRESHOLD;
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::image::ImagePlane;
use crate::seed::derive_frame_seed;
use crate::setting::{CameraSetting, SettingKind};
use crate::simulate::{bokeh_params, render_frame, Scene};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
/// Optional `{"kind": ..., "values": [...]}` file inside a frame directory.
pub const SETTINGS_FILE: &str = "settings.json";

/// Frames `frame_0.png, frame_1.png, ...` of one directory.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameDir {
    pub path: PathBuf,
    pub frames: Vec<ImagePlane>,
    pub kind: Option<SettingKind>,
    pub values: Option<Vec<f64>>,
}

#[derive(Deserialize)]
struct SettingsFile {
    kind: Option<SettingKind>,
    values: Option<Vec<f64>>,
}

pub fn load_frame_dir(dir: &Path) -> Result<FrameDir> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut indexed = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        if let Some(i) = name
            .strip_prefix("frame_")
            .and_then(|r| r.strip_suffix(".png"))
            .and_then(|i| i.parse::<usize>().ok())
        {
            indexed.push((i, path));
        }
    }
    indexed.sort();
    if indexed.is_empty() {
        return Err(Error::InvalidArgument(format!("no frame_<i>.png files in {}", dir.display())));
    }
    if let Some((k, _)) = indexed.iter().enumerate().find(|(k, (i, _))| k != i) {
        return Err(Error::MissingFrames(vec![dir.join(format!("frame_{k}.png"))]));
    }
    let frames = indexed
        .iter()
        .map(|(i, p)| ImagePlane::read_png(p).map_err(|e| e.in_frame(*i)))
        .collect::<Result<Vec<_>>>()?;
    let settings_path = dir.join(SETTINGS_FILE);
    let (kind, values) = if settings_path.is_file() {
        let text = std::fs::read_to_string(&settings_path).map_err(|e| Error::io(&settings_path, e))?;
        let s: SettingsFile = serde_json::from_str(&text)?;
        (s.kind, s.values)
    } else {
        (None, None)
    };
    Ok(FrameDir {
        path: dir.to_path_buf(),
        frames,
        kind,
        values,
    })
}

/// Scores a whole frame set (for example with a learned aesthetic model).
pub trait QualityScorer: Send + Sync {
    fn name(&self) -> &str;
    fn score(&self, frames: &[ImagePlane]) -> Result<f64>;
}

/// Runs `program args.. DIR` with the frames written to `DIR/frame_<i>.png`
/// and reads a number from stdout.
#[derive(Debug, Clone)]
pub struct CommandQuality {
    pub name: String,
    pub program: PathBuf,
    pub args: Vec<String>,
}

impl QualityScorer for CommandQuality {
    fn name(&self) -> &str {
        &self.name
    }

    fn score(&self, frames: &[ImagePlane]) -> Result<f64> {
        let dir = tempfile::tempdir().map_err(|e| Error::io(std::env::temp_dir(), e))?;
        for (i, f) in frames.iter().enumerate() {
            f.write_png(dir.path().join(format!("frame_{i}.png")))?;
        }
        let mut cmd = Command::new(&self.program);
        cmd.args(&self.args).arg(dir.path());
        run_for_number(cmd)
    }
}

pub enum ReferenceSource {
    Frames(FrameDir),
    /// Render the reference from a base scene at the evaluated setting values.
    Simulate {
        scene: Box<Scene>,
        config: SimConfig,
        seed: u64,
    },
}

pub struct EvalOptions<'a> {
    pub kind: Option<SettingKind>,
    pub values: Option<Vec<f64>>,
    pub metric: &'a dyn PerceptualMetric,
    pub reduction: ColorTempReduction,
    pub quality: Option<&'a dyn QualityScorer>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub kind: SettingKind,
    pub frame_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    pub accuracy_corrcoef: f64,
    pub consistency: f64,
    pub reference_consistency: f64,
    /// `|consistency - reference_consistency|`; smaller is better.
    pub consistency_gap: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quality: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quality_plugin: Option<String>,
    pub perceptual_metric: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colortemp_reduction: Option<ColorTempReduction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_method: Option<String>,
    pub generated: EffectSeries,
    pub reference: EffectSeries,
}

/// Scores in-memory frames. `mask` restricts the bokeh Laplacian.
pub fn evaluate_frames(
    kind: SettingKind,
    generated: &[ImagePlane],
    reference: &[ImagePlane],
    values: Option<Vec<f64>>,
    mask: Option<Vec<bool>>,
    opts: &EvalOptions<'_>,
) -> Result<EvalReport> {
    if generated.len() != reference.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} generated frames, {} reference frames",
            generated.len(),
            reference.len()
        )));
    }
    let gen_mask = mask.as_ref().filter(|m| m.len() == generated[0].width() * generated[0].height());
    let ref_mask = mask.as_ref().filter(|m| m.len() == reference[0].width() * reference[0].height());
    let g = measure_effect(generated, kind, &MeasureOptions { mask: gen_mask.cloned() })?;
    let r = measure_effect(reference, kind, &MeasureOptions { mask: ref_mask.cloned() })?;
    let accuracy = trend_corrcoef_with(&g, &r, opts.reduction)?;
    let consistency = consistency_score(generated, opts.metric)?;
    let reference_consistency = consistency_score(reference, opts.metric)?;
    let quality = opts.quality.map(|q| q.score(generated)).transpose()?;
    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        kind,
        frame_count: generated.len(),
        values,
        accuracy_corrcoef: accuracy,
        consistency,
        reference_consistency,
        consistency_gap: (consistency - reference_consistency).abs(),
        quality,
        quality_plugin: opts.quality.map(|q| q.name().to_string()),
        perceptual_metric: opts.metric.name().to_string(),
        colortemp_reduction: (kind == SettingKind::ColorTemp).then_some(opts.reduction),
        scale_method: (kind == SettingKind::Focal).then(|| SCALE_METHOD.to_string()),
        generated: g,
        reference: r,
    })
}

fn values_match(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9 * x.abs().max(1.0))
}

pub fn evaluate(generated_dir: &Path, reference: ReferenceSource, opts: &EvalOptions<'_>) -> Result<EvalReport> {
    let generated = load_frame_dir(generated_dir)?;
    let reference_dir = match &reference {
        ReferenceSource::Frames(d) => Some(d),
        ReferenceSource::Simulate { .. } => None,
    };
    let kind = opts
        .kind
        .or(generated.kind)
        .or(reference_dir.and_then(|d| d.kind))
        .ok_or_else(|| Error::InvalidArgument("setting kind unknown: pass it explicitly".into()))?;
    for k in [generated.kind, reference_dir.and_then(|d| d.kind)].into_iter().flatten() {
        if k != kind {
            return Err(Error::InvalidArgument(format!("frame directory is for {k}, evaluating {kind}")));
        }
    }

    let known: Vec<&Vec<f64>> = [opts.values.as_ref(), generated.values.as_ref(), reference_dir.and_then(|d| d.values.as_ref())]
        .into_iter()
        .flatten()
        .collect();
    if let Some(first) = known.first() {
        if let Some(other) = known.iter().find(|v| !values_match(first, v)) {
            return Err(Error::InvalidArgument(format!("setting values differ: {first:?} vs {other:?}")));
        }
    }
    let values = known.first().map(|v| (*v).clone());
    if let Some(v) = &values {
        if v.len() != generated.frames.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} setting values for {} generated frames",
                v.len(),
                generated.frames.len()
            )));
        }
    }

    let (reference_frames, mask) = match reference {
        ReferenceSource::Frames(d) => (d.frames, None),
        ReferenceSource::Simulate { scene, mut config, seed } => {
            let values = values
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("simulating a reference needs the setting values".into()))?;
            if kind == SettingKind::Focal {
                config.focal.out_width = Some(generated.frames[0].width());
                config.focal.out_height = Some(generated.frames[0].height());
            }
            let frames = values
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    // Quantized like a frame written by `simulate`, so both sides carry the same 8-bit rounding.
                    let f = render_frame(&scene, CameraSetting::new(kind, v)?, &config, derive_frame_seed(seed, i as u64))
                        .map_err(|e| e.in_frame(i))?;
                    ImagePlane::from_rgb8(f.width(), f.height(), &f.to_rgb8())
                })
                .collect::<Result<Vec<_>>>()?;
            let mask = match (&scene.disparity, kind) {
                (Some(d), SettingKind::Bokeh) => {
                    let p = bokeh_params(d, values[0], &config)?;
                    Some(background_mask(d, p.focus_disparity, BACKGROUND_THRESHOLD))
                }
                _ => None,
            };
            (frames, mask)
        }
    };
    evaluate_frames(kind, &generated.frames, &reference_frames, values, mask, opts)
}

//! Effect measurement and scoring of frame sets.
//!
//! A frame set is reduced to an [`EffectSeries`] per camera setting:
//!
//! | kind      | per-frame value                                     |
//! |-----------|-----------------------------------------------------|
//! | Bokeh     | mean absolute 4-neighbour Laplacian of Rec.709 luma |
//! | Shutter   | mean Rec.709 luma                                   |
//! | ColorTemp | mean(B) - mean(R) (per-channel means kept as well)  |
//! | Focal     | cumulative scale relative to frame 0                |
//!
//! Generated and reference series are compared with Pearson correlation
//! ([`trend_corrcoef`]); frame-to-frame stability with a perceptual distance
//! ([`perceptual`]).

mod evaluate;
pub mod perceptual;
pub mod plot;
pub mod registration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{GrayPlane, ImagePlane};
use crate::setting::SettingKind;

pub use evaluate::{
    evaluate, evaluate_frames, load_frame_dir, EvalOptions, EvalReport, FrameDir, QualityScorer, CommandQuality,
    ReferenceSource, REPORT_SCHEMA_VERSION, SETTINGS_FILE,
};
pub use perceptual::{consistency_score, CommandMetric, Dssim, PerceptualMetric};
pub use registration::{scale_factor, ScaleEstimate, SCALE_METHOD};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectSeries {
    pub kind: SettingKind,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel_means: Option<Vec<[f64; 3]>>,
    /// Focal only: scale between consecutive frames.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairwise_scales: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl EffectSeries {
    pub fn scalar(kind: SettingKind, values: Vec<f64>) -> Self {
        Self {
            kind,
            values,
            channel_means: None,
            pairwise_scales: None,
            warnings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// How color-temperature series are compared.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorTempReduction {
    /// Single coolness axis mean(B) - mean(R).
    #[default]
    BlueMinusRed,
    /// Average of the three per-channel correlations.
    PerChannel,
}

/// Pearson correlation. When either input has zero variance the result is
/// 1.0 if both are constant and 0.0 otherwise.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument("correlation needs at least two values".into()));
    }
    if let Some(v) = x.iter().chain(y).find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite series value {v}")));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    // Relative test so rounding noise in a constant series counts as constant.
    let flat_x = sxx <= f64::EPSILON * f64::EPSILON * mx * mx * n || sxx == 0.0;
    let flat_y = syy <= f64::EPSILON * f64::EPSILON * my * my * n || syy == 0.0;
    match (flat_x, flat_y) {
        (true, true) => Ok(1.0),
        (true, false) | (false, true) => Ok(0.0),
        _ => Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)),
    }
}

pub fn trend_corrcoef(generated: &EffectSeries, reference: &EffectSeries) -> Result<f64> {
    trend_corrcoef_with(generated, reference, ColorTempReduction::BlueMinusRed)
}

pub fn trend_corrcoef_with(
    generated: &EffectSeries,
    reference: &EffectSeries,
    reduction: ColorTempReduction,
) -> Result<f64> {
    if generated.len() != reference.len() {
        return Err(Error::DimensionMismatch(format!(
            "generated series has {} values, reference has {}",
            generated.len(),
            reference.len()
        )));
    }
    if reduction == ColorTempReduction::PerChannel && generated.kind == SettingKind::ColorTemp {
        if let (Some(g), Some(r)) = (&generated.channel_means, &reference.channel_means) {
            let mut total = 0.0;
            for c in 0..3 {
                let gc: Vec<f64> = g.iter().map(|m| m[c]).collect();
                let rc: Vec<f64> = r.iter().map(|m| m[c]).collect();
                total += pearson(&gc, &rc)?;
            }
            return Ok(total / 3.0);
        }
    }
    pearson(&generated.values, &reference.values)
}

/// Mean `|4 p - up - down - left - right|` over interior pixels, optionally
/// restricted to pixels where `mask` is true.
pub fn mean_abs_laplacian(gray: &GrayPlane, mask: Option<&[bool]>) -> Result<f64> {
    let (w, h) = (gray.width(), gray.height());
    if w < 3 || h < 3 {
        return Err(Error::InvalidArgument(format!("{w}x{h} image has no interior pixels")));
    }
    if let Some(m) = mask {
        if m.len() != w * h {
            return Err(Error::DimensionMismatch(format!(
                "mask has {} entries for a {w}x{h} image",
                m.len()
            )));
        }
    }
    let d = gray.data();
    // Per-row partial sums are combined sequentially so the result does not
    // depend on thread scheduling.
    let rows: Vec<(f64, usize)> = (1..h - 1)
        .into_par_iter()
        .map(|y| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for x in 1..w - 1 {
                let i = y * w + x;
                if mask.is_some_and(|m| !m[i]) {
                    continue;
                }
                sum += (4.0 * d[i] - d[i - 1] - d[i + 1] - d[i - w] - d[i + w]).abs();
                count += 1;
            }
            (sum, count)
        })
        .collect();
    let (sum, count) = rows.iter().fold((0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if count == 0 {
        return Err(Error::InvalidArgument("Laplacian mask selects no interior pixel".into()));
    }
    Ok(sum / count as f64)
}

#[derive(Debug, Clone, Default)]
pub struct MeasureOptions {
    /// Bokeh: restrict the Laplacian to these pixels (usually the background).
    pub mask: Option<Vec<bool>>,
}

pub fn measure_effect(frames: &[ImagePlane], kind: SettingKind, opts: &MeasureOptions) -> Result<EffectSeries> {
    if frames.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least two frames, got {}",
            frames.len()
        )));
    }
    let (w, h) = (frames[0].width(), frames[0].height());
    if let Some((i, f)) = frames.iter().enumerate().find(|(_, f)| !f.same_size(w, h)) {
        return Err(Error::DimensionMismatch(format!(
            "frame {i} is {}x{}, frame 0 is {w}x{h}",
            f.width(),
            f.height()
        )));
    }
    match kind {
        SettingKind::Bokeh => {
            let values = frames
                .par_iter()
                .map(|f| mean_abs_laplacian(&f.luma(), opts.mask.as_deref()))
                .collect::<Result<Vec<_>>>()?;
            Ok(EffectSeries::scalar(kind, values))
        }
        SettingKind::Shutter => Ok(EffectSeries::scalar(kind, frames.par_iter().map(ImagePlane::mean_luma).collect())),
        SettingKind::ColorTemp => {
            let means: Vec<[f64; 3]> = frames.par_iter().map(ImagePlane::channel_means).collect();
            let mut series = EffectSeries::scalar(kind, means.iter().map(|m| m[2] - m[0]).collect());
            series.channel_means = Some(means);
            Ok(series)
        }
        SettingKind::Focal => {
            let estimates = frames
                .par_windows(2)
                .enumerate()
                .map(|(i, pair)| {
                    scale_factor(&pair[0], &pair[1]).map_err(|e| match e {
                        Error::ScaleEstimation { reason, .. } => Error::ScaleEstimation {
                            from: i,
                            to: i + 1,
                            reason,
                        },
                        e => e,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let mut values = vec![1.0];
            let mut warnings = Vec::new();
            for (i, est) in estimates.iter().enumerate() {
                values.push(values[i] * est.scale);
                if let Some(w) = &est.warning {
                    warnings.push(format!("frames {}-{}: {w}", i, i + 1));
                }
            }
            Ok(EffectSeries {
                kind,
                values,
                channel_means: None,
                pairwise_scales: Some(estimates.iter().map(|e| e.scale).collect()),
                warnings,
            })
        }
    }
}

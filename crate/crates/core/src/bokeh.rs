//! Disparity-driven depth-of-field blur with a fixed foreground focus.
//!
//! Each output pixel `p` gathers a uniform disc of radius
//! `r(p) = radius_scale * K * |d(p) - d_focus|`. A source pixel `q` in the
//! disc gets weight 1 when it is at least as defocused as `p`
//! (`|d(q) - d_focus| >= |d(p) - d_focus| * (1 - margin)`) and weight `leak`
//! otherwise, so sharp foreground pixels do not bleed into the blurred
//! background around them. Weights are renormalised per pixel; pixels with
//! `r < 0.5` are copied.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::image::{GrayPlane, ImagePlane};
use crate::metrics::{mean_abs_laplacian, EffectSeries};
use crate::setting::SettingKind;

pub const DEFAULT_FOCUS_PERCENTILE: f64 = 95.0;
pub const DEFAULT_DEPTH_EPSILON: f64 = 1e-3;
/// `|d - d_focus|` above which a pixel counts as background for blur trends.
pub const BACKGROUND_THRESHOLD: f64 = 0.2;

/// Disparity normalised to `[0, 1]`, larger is closer.
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMap(GrayPlane);

impl DisparityMap {
    pub fn new(plane: GrayPlane) -> Result<Self> {
        if let Some(v) = plane.data().iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("disparity {v} outside [0, 1]")));
        }
        Ok(Self(plane))
    }

    pub fn plane(&self) -> &GrayPlane {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.width()
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }

    pub fn data(&self) -> &[f64] {
        self.0.data()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Disparity {
    pub map: DisparityMap,
    /// Set when the depth was constant and min-max normalisation collapsed.
    pub degenerate: bool,
}

/// `1 / (depth + eps)`, min-max normalised.
pub fn depth_to_disparity(depth: &GrayPlane, eps: f64) -> Result<Disparity> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {eps}")));
    }
    if let Some(v) = depth.data().iter().find(|v| **v < 0.0) {
        return Err(Error::Domain(format!("negative depth {v}")));
    }
    let inv: Vec<f64> = depth.data().iter().map(|d| 1.0 / (d + eps)).collect();
    let lo = inv.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = inv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (data, degenerate) = if hi > lo {
        (inv.iter().map(|v| (v - lo) / (hi - lo)).collect(), false)
    } else {
        tracing::warn!("constant depth map, disparity set to zero");
        (vec![0.0; inv.len()], true)
    };
    Ok(Disparity {
        map: DisparityMap(GrayPlane::from_parts(depth.width(), depth.height(), data)),
        degenerate,
    })
}

/// Percentile of the disparity values with linear interpolation between
/// order statistics (rank `p / 100 * (n - 1)`).
pub fn pick_focus_disparity(disp: &DisparityMap, percentile: f64) -> Result<f64> {
    check_range("percentile", percentile, 0.0, 100.0)?;
    let mut v = disp.data().to_vec();
    v.sort_by(f64::total_cmp);
    let rank = percentile / 100.0 * (v.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    Ok(v[lo] + (v[hi] - v[lo]) * (rank - lo as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BokehParams {
    /// Blur strength `K` in `[1, 30]`.
    pub blur: f64,
    pub focus_disparity: f64,
    /// Pixels of radius per unit of `K * |delta d|`.
    pub radius_scale: f64,
    /// Relative defocus tolerance when deciding occluders.
    pub margin: f64,
    /// Weight of sharper-than-target contributions.
    pub leak: f64,
}

impl BokehParams {
    pub fn new(blur: f64, focus_disparity: f64) -> Result<Self> {
        let params = Self {
            blur,
            focus_disparity,
            radius_scale: 1.0,
            margin: 0.1,
            leak: 0.05,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        SettingKind::Bokeh.check(self.blur)?;
        check_range("focus disparity", self.focus_disparity, 0.0, 1.0)?;
        check_range("margin", self.margin, 0.0, 1.0)?;
        check_range("leak", self.leak, 0.0, 1.0)?;
        if !(self.radius_scale.is_finite() && self.radius_scale > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "radius scale must be positive, got {}",
                self.radius_scale
            )));
        }
        Ok(())
    }

    pub fn max_radius_px(&self) -> f64 {
        self.radius_scale * self.blur
    }

    pub fn radius(&self, disparity: f64) -> f64 {
        self.max_radius_px() * (disparity - self.focus_disparity).abs()
    }
}

/// Disc offsets sorted by squared distance, so a radius selects a prefix.
fn disc_offsets(max_radius: f64) -> Vec<(i32, i32, f64)> {
    let r = max_radius.ceil() as i32;
    let mut offs = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            let d2 = f64::from(dx * dx + dy * dy);
            if d2 <= max_radius * max_radius {
                offs.push((dx, dy, d2));
            }
        }
    }
    offs.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.1.cmp(&b.1)).then(a.0.cmp(&b.0)));
    offs
}

pub fn render_bokeh(img: &ImagePlane, disp: &DisparityMap, params: &BokehParams) -> Result<ImagePlane> {
    params.validate()?;
    if !img.same_size(disp.width(), disp.height()) {
        return Err(Error::DimensionMismatch(format!(
            "image is {}x{}, disparity is {}x{}",
            img.width(),
            img.height(),
            disp.width(),
            disp.height()
        )));
    }
    let (w, h) = (img.width(), img.height());
    let src = img.data();
    let d = disp.data();
    let defocus: Vec<f64> = d.iter().map(|v| (v - params.focus_disparity).abs()).collect();
    let offsets = disc_offsets(params.max_radius_px());
    let keep = 1.0 - params.margin;

    let mut out = src.to_vec();
    out.par_chunks_mut(w * 3).enumerate().for_each(|(y, row)| {
        for x in 0..w {
            let p = y * w + x;
            let r = params.radius_scale * params.blur * defocus[p];
            if r < 0.5 {
                continue;
            }
            let r2 = r * r;
            let threshold = defocus[p] * keep;
            // Offsets from the centre value, so flat regions come back bit-exact.
            let centre = [src[p * 3], src[p * 3 + 1], src[p * 3 + 2]];
            let mut acc = [0.0; 3];
            let mut total = 0.0;
            for &(dx, dy, d2) in &offsets {
                if d2 > r2 {
                    break;
                }
                let qx = x as i64 + i64::from(dx);
                let qy = y as i64 + i64::from(dy);
                if qx < 0 || qy < 0 || qx >= w as i64 || qy >= h as i64 {
                    continue;
                }
                let q = qy as usize * w + qx as usize;
                let weight = if defocus[q] >= threshold { 1.0 } else { params.leak };
                for c in 0..3 {
                    acc[c] += weight * (src[q * 3 + c] - centre[c]);
                }
                total += weight;
            }
            if total > 0.0 {
                for c in 0..3 {
                    row[x * 3 + c] = (centre[c] + acc[c] / total).clamp(0.0, 1.0);
                }
            }
        }
    });
    Ok(ImagePlane::from_parts(w, h, out, img.encoding()))
}

/// Pixels with `|d - d_focus| > threshold`.
pub fn background_mask(disp: &DisparityMap, focus: f64, threshold: f64) -> Vec<bool> {
    disp.data().iter().map(|v| (v - focus).abs() > threshold).collect()
}

/// Background sharpness (mean `|Laplacian|` of luma) for each blur value.
pub fn blur_trend(
    img: &ImagePlane,
    disp: &DisparityMap,
    blur_values: &[f64],
    template: &BokehParams,
) -> Result<EffectSeries> {
    let mask = background_mask(disp, template.focus_disparity, BACKGROUND_THRESHOLD);
    if !mask.iter().any(|&m| m) {
        return Err(Error::InvalidArgument("no background pixels in the disparity map".into()));
    }
    let values = blur_values
        .iter()
        .map(|&k| {
            let params = BokehParams { blur: k, ..*template };
            let frame = render_bokeh(img, disp, &params)?;
            mean_abs_laplacian(&frame.luma(), Some(&mask))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EffectSeries::scalar(SettingKind::Bokeh, values))
}

//! Focal-length simulation by centre crop and resize.
//!
//! For a pinhole camera the linear field-of-view ratio between the base focal
//! length and a longer target is `tan(fov_t / 2) / tan(fov_b / 2) = f_b / f_t`
//! on every axis. The crop window has `round_half_up(rho * W) x
//! round_half_up(rho * H)` pixels and starts at `floor((W - cw) / 2)`,
//! `floor((H - ch) / 2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{GrayPlane, ImagePlane};
use crate::resample::{resize_window, Window};
use crate::sensor::SensorSpec;

/// Short-side resolution below which crops lose too much detail.
pub const MIN_SHORT_SIDE: usize = 3000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FovAxis {
    Horizontal,
    Vertical,
    Diagonal,
}

/// Field of view in degrees: `2 atan(dim / 2f)`.
pub fn fov(spec: &SensorSpec, focal_mm: f64, axis: FovAxis) -> Result<f64> {
    if !(focal_mm.is_finite() && focal_mm > 0.0) {
        return Err(Error::InvalidArgument(format!("focal length must be positive, got {focal_mm}")));
    }
    let dim = match axis {
        FovAxis::Horizontal => spec.width_mm,
        FovAxis::Vertical => spec.height_mm,
        FovAxis::Diagonal => spec.width_mm.hypot(spec.height_mm),
    };
    Ok((2.0 * (dim / (2.0 * focal_mm)).atan()).to_degrees())
}

/// Linear crop fraction `f_base / f_target`.
pub fn crop_fraction(spec: &SensorSpec, focal_mm: f64) -> Result<f64> {
    spec.validate()?;
    if !(focal_mm.is_finite() && focal_mm >= spec.base_focal_mm) {
        return Err(Error::InvalidArgument(format!(
            "target focal length {focal_mm} mm must not be shorter than the base {} mm",
            spec.base_focal_mm
        )));
    }
    Ok(spec.base_focal_mm / focal_mm)
}

fn round_half_up(v: f64) -> usize {
    (v + 0.5).floor() as usize
}

/// Centred crop window for `focal_mm` in a `width x height` frame.
pub fn crop_window(width: usize, height: usize, spec: &SensorSpec, focal_mm: f64) -> Result<Window> {
    let rho = crop_fraction(spec, focal_mm)?;
    let cw = round_half_up(rho * width as f64).min(width);
    let ch = round_half_up(rho * height as f64).min(height);
    if cw < 2 || ch < 2 {
        return Err(Error::InvalidArgument(format!(
            "crop of {cw}x{ch} pixels is smaller than 2x2"
        )));
    }
    Ok(Window {
        x: (width - cw) / 2,
        y: (height - ch) / 2,
        width: cw,
        height: ch,
    })
}

pub fn simulate_focal(
    base: &ImagePlane,
    spec: &SensorSpec,
    focal_mm: f64,
    out_width: usize,
    out_height: usize,
) -> Result<ImagePlane> {
    let window = crop_window(base.width(), base.height(), spec, focal_mm)?;
    let short = base.width().min(base.height());
    if short < MIN_SHORT_SIDE {
        tracing::warn!(
            short_side = short,
            minimum = MIN_SHORT_SIDE,
            "base image is below the recommended resolution for focal simulation"
        );
    }
    resize_window(base, window, out_width, out_height)
}

/// Visibility mask at `width x height`: 1 inside the crop window, 0 outside.
pub fn focal_mask(focal_mm: f64, spec: &SensorSpec, width: usize, height: usize) -> Result<GrayPlane> {
    let w = crop_window(width, height, spec, focal_mm)?;
    GrayPlane::from_fn(width, height, |x, y| {
        let inside = x >= w.x && x < w.x + w.width && y >= w.y && y < w.y + w.height;
        if inside {
            1.0
        } else {
            0.0
        }
    })
}

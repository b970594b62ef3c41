//! Per-task suitability checks for base images.

use crate::bokeh::{pick_focus_disparity, DisparityMap};
use crate::config::GateConfig;
use crate::error::Result;
use crate::image::ImagePlane;
use crate::setting::SettingKind;

/// Returns the reason the image fails the gate for `kind`, or `None`.
///
/// * Focal: short side at least `focal_min_short_side` pixels.
/// * Bokeh: a disparity map exists and its P95 - P5 spread exceeds
///   `bokeh_min_spread`.
/// * Shutter, ColorTemp: mean Rec.709 luma within `[luma_min, luma_max]`.
pub fn check_gate(
    kind: SettingKind,
    image: &ImagePlane,
    disparity: Option<&DisparityMap>,
    gates: &GateConfig,
) -> Result<Option<String>> {
    Ok(match kind {
        SettingKind::Focal => {
            let short = image.width().min(image.height());
            (short < gates.focal_min_short_side)
                .then(|| format!("short side {short} px is below {} px", gates.focal_min_short_side))
        }
        SettingKind::Bokeh => match disparity {
            None => Some("no disparity or depth map".to_string()),
            Some(d) => {
                let spread = pick_focus_disparity(d, 95.0)? - pick_focus_disparity(d, 5.0)?;
                (spread <= gates.bokeh_min_spread).then(|| {
                    format!(
                        "disparity spread {spread:.3} does not exceed {}",
                        gates.bokeh_min_spread
                    )
                })
            }
        },
        SettingKind::Shutter | SettingKind::ColorTemp => {
            let luma = image.mean_luma();
            (!(gates.luma_min..=gates.luma_max).contains(&luma))
                .then(|| format!("mean luma {luma:.3} outside [{}, {}]", gates.luma_min, gates.luma_max))
        }
    })
}

//! Rendering a single camera setting from a base scene.

use std::path::{Path, PathBuf};

use crate::bokeh::{depth_to_disparity, pick_focus_disparity, render_bokeh, BokehParams, DisparityMap};
use crate::colortemp::apply_color_temperature;
use crate::config::SimConfig;
use crate::embedding::EmbeddingTensor;
use crate::error::{Error, Result};
use crate::exposure::{simulate_exposure, ExposureMode};
use crate::focal::simulate_focal;
use crate::image::{GrayPlane, ImagePlane};
use crate::setting::{CameraSetting, SettingKind};

/// A base image and, for bokeh, its disparity.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub image: ImagePlane,
    pub disparity: Option<DisparityMap>,
}

impl Scene {
    pub fn new(image: ImagePlane, disparity: Option<DisparityMap>) -> Self {
        Self { image, disparity }
    }

    /// Loads `path` and its disparity sidecar if one exists (see [`find_disparity_sidecar`]).
    pub fn load(path: impl AsRef<Path>, config: &SimConfig) -> Result<Self> {
        let path = path.as_ref();
        let image = ImagePlane::read_png(path)?;
        let disparity = match find_disparity_sidecar(path) {
            Some(side) => Some(load_disparity_sidecar(&side, config.bokeh.depth_epsilon)?),
            None => None,
        };
        Ok(Self { image, disparity })
    }
}

/// Sidecars are looked up next to the image, in this order:
/// `<stem>.disparity.png`, `<stem>.disparity.cemb`, `<stem>.depth.png`.
pub fn find_disparity_sidecar(image: &Path) -> Option<PathBuf> {
    let stem = image.file_stem()?.to_string_lossy().into_owned();
    let dir = image.parent().unwrap_or(Path::new(""));
    ["disparity.png", "disparity.cemb", "depth.png"]
        .iter()
        .map(|suffix| dir.join(format!("{stem}.{suffix}")))
        .find(|p| p.is_file())
}

/// Reads a disparity file; `*.depth.png` files are converted from depth.
pub fn load_disparity_sidecar(path: &Path, depth_epsilon: f64) -> Result<DisparityMap> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    if name.ends_with(".depth.png") {
        let depth = GrayPlane::read_png(path)?;
        let d = depth_to_disparity(&depth, depth_epsilon)?;
        if d.degenerate {
            tracing::warn!(path = %path.display(), "constant depth map");
        }
        return Ok(d.map);
    }
    load_disparity(path)
}

/// Disparity as an 8-bit single-channel PNG (`v / 255`) or a `1 x 1 x H x W`
/// tensor file.
pub fn load_disparity(path: &Path) -> Result<DisparityMap> {
    let is_tensor = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("cemb"));
    if is_tensor {
        let t = EmbeddingTensor::read(path)?;
        let (f_r, c, h, w) = t.dims();
        if f_r != 1 || c != 1 {
            return Err(Error::TensorFormat(format!(
                "disparity tensor must be 1x1xHxW, got {f_r}x{c}x{h}x{w}"
            )));
        }
        let plane = GrayPlane::new(w, h, t.data().iter().map(|&v| f64::from(v)).collect())?;
        return DisparityMap::new(plane);
    }
    DisparityMap::new(GrayPlane::read_png(path)?)
}

pub fn bokeh_params(disp: &DisparityMap, blur: f64, config: &SimConfig) -> Result<BokehParams> {
    let focus = pick_focus_disparity(disp, config.bokeh.focus_percentile)?;
    let params = BokehParams {
        blur,
        focus_disparity: focus,
        radius_scale: config.bokeh.radius_scale,
        margin: config.bokeh.margin,
        leak: config.bokeh.leak,
    };
    params.validate()?;
    Ok(params)
}

/// Renders one frame. `frame_seed` drives the stochastic exposure mode and is
/// ignored otherwise.
pub fn render_frame(scene: &Scene, setting: CameraSetting, config: &SimConfig, frame_seed: u64) -> Result<ImagePlane> {
    let base = &scene.image;
    let v = setting.value();
    match setting.kind() {
        SettingKind::ColorTemp => apply_color_temperature(base, v),
        SettingKind::Shutter => {
            let mode = if config.exposure.stochastic {
                ExposureMode::Stochastic { seed: frame_seed }
            } else {
                ExposureMode::Deterministic
            };
            simulate_exposure(base, v, &config.sensor, mode)
        }
        SettingKind::Focal => {
            let w = config.focal.out_width.unwrap_or(base.width());
            let h = config.focal.out_height.unwrap_or(base.height());
            simulate_focal(base, &config.focal.spec, v, w, h)
        }
        SettingKind::Bokeh => {
            let disp = scene
                .disparity
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("bokeh rendering needs a disparity map".into()))?;
            render_bokeh(base, disp, &bokeh_params(disp, v, config)?)
        }
    }
}

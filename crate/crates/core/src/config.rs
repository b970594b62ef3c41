//! Simulation and pipeline configuration.
//!
//! Every field has a default, so a JSON file only needs the keys it changes:
//!
//! ```json
//! { "bokeh": { "focus_percentile": 90 }, "quality_gates": { "policy": "strict" } }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bokeh::{DEFAULT_DEPTH_EPSILON, DEFAULT_FOCUS_PERCENTILE};
use crate::error::{Error, Result};
use crate::sensor::{SensorModel, SensorSpec};

/// Overrides `captioner.endpoint` when set.
pub const CAPTIONER_ENDPOINT_ENV: &str = "CAMSIM_CAPTIONER_ENDPOINT";

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub sensor: SensorModel,
    pub focal: FocalConfig,
    pub bokeh: BokehConfig,
    pub exposure: ExposureConfig,
    pub captioner: CaptionerConfig,
    pub quality_gates: GateConfig,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FocalConfig {
    pub spec: SensorSpec,
    /// Output size of focal frames; the base size when unset.
    pub out_width: Option<usize>,
    pub out_height: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BokehConfig {
    pub focus_percentile: f64,
    pub radius_scale: f64,
    pub margin: f64,
    pub leak: f64,
    pub depth_epsilon: f64,
}

impl Default for BokehConfig {
    fn default() -> Self {
        Self {
            focus_percentile: DEFAULT_FOCUS_PERCENTILE,
            radius_scale: 1.0,
            margin: 0.1,
            leak: 0.05,
            depth_epsilon: DEFAULT_DEPTH_EPSILON,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ExposureConfig {
    /// Render shutter frames through the noisy sensor chain.
    pub stochastic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CaptionerConfig {
    pub endpoint: Option<String>,
    pub timeout_secs: u64,
}

impl Default for CaptionerConfig {
    fn default() -> Self {
        Self {
            endpoint: None,
            timeout_secs: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GatePolicy {
    /// Log and skip the base image.
    #[default]
    Skip,
    /// Log and build the set anyway.
    Warn,
    /// Abort the build.
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GateConfig {
    pub policy: GatePolicy,
    pub focal_min_short_side: usize,
    /// Minimum P95 - P5 disparity spread.
    pub bokeh_min_spread: f64,
    pub luma_min: f64,
    pub luma_max: f64,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            policy: GatePolicy::Skip,
            focal_min_short_side: crate::focal::MIN_SHORT_SIDE,
            bokeh_min_spread: 0.3,
            luma_min: 0.25,
            luma_max: 0.75,
        }
    }
}

impl SimConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: SimConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    /// Applies [`CAPTIONER_ENDPOINT_ENV`] if it is set and non-empty.
    pub fn with_env_overrides(mut self) -> Self {
        if let Ok(v) = std::env::var(CAPTIONER_ENDPOINT_ENV) {
            if !v.trim().is_empty() {
                self.captioner.endpoint = Some(v);
            }
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.sensor.validate()?;
        self.focal.spec.validate()?;
        if self.focal.out_width == Some(0) || self.focal.out_height == Some(0) {
            return Err(Error::InvalidArgument("focal output size must be positive".into()));
        }
        let b = &self.bokeh;
        crate::error::check_range("focus percentile", b.focus_percentile, 0.0, 100.0)?;
        crate::error::check_range("bokeh margin", b.margin, 0.0, 1.0)?;
        crate::error::check_range("bokeh leak", b.leak, 0.0, 1.0)?;
        if !(b.radius_scale > 0.0 && b.radius_scale.is_finite()) {
            return Err(Error::InvalidArgument("bokeh radius scale must be positive".into()));
        }
        if !(b.depth_epsilon > 0.0 && b.depth_epsilon.is_finite()) {
            return Err(Error::InvalidArgument("depth epsilon must be positive".into()));
        }
        let g = &self.quality_gates;
        if g.luma_min.is_nan() || g.luma_max.is_nan() || g.luma_min > g.luma_max {
            return Err(Error::InvalidArgument("luma gate minimum exceeds maximum".into()));
        }
        Ok(())
    }

    /// SHA-256 (hex) of everything that influences rendered pixels. Captioner
    /// and gate settings are left out.
    pub fn hash(&self) -> String {
        let sim = serde_json::json!({
            "sensor": self.sensor,
            "focal": self.focal,
            "bokeh": self.bokeh,
            "exposure": self.exposure,
        });
        let digest = Sha256::digest(sim.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

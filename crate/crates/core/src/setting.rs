use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};

/// The camera intrinsic a contrastive set varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SettingKind {
    /// Bokeh blur strength `K`, dimensionless.
    Bokeh,
    /// Focal length in millimetres.
    Focal,
    /// Shutter speed on the normalised `0.1..=1.0` scale (larger is brighter).
    Shutter,
    /// Color temperature in Kelvin.
    #[serde(rename = "colortemp")]
    ColorTemp,
}

impl SettingKind {
    pub const ALL: [SettingKind; 4] = [
        SettingKind::Bokeh,
        SettingKind::Focal,
        SettingKind::Shutter,
        SettingKind::ColorTemp,
    ];

    /// Closed legal range `(min, max)`.
    pub fn range(self) -> (f64, f64) {
        match self {
            SettingKind::Bokeh => (1.0, 30.0),
            SettingKind::Focal => (24.0, 70.0),
            SettingKind::Shutter => (0.1, 1.0),
            SettingKind::ColorTemp => (2000.0, 10000.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SettingKind::Bokeh => "bokeh",
            SettingKind::Focal => "focal",
            SettingKind::Shutter => "shutter",
            SettingKind::ColorTemp => "colortemp",
        }
    }

    pub fn check(self, value: f64) -> Result<f64> {
        let (min, max) = self.range();
        check_range(self.name(), value, min, max)
    }
}

impl fmt::Display for SettingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SettingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bokeh" => Ok(SettingKind::Bokeh),
            "focal" => Ok(SettingKind::Focal),
            "shutter" => Ok(SettingKind::Shutter),
            "colortemp" | "color-temp" | "color_temp" => Ok(SettingKind::ColorTemp),
            other => Err(Error::InvalidArgument(format!("unknown setting kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraSetting {
    kind: SettingKind,
    value: f64,
}

impl CameraSetting {
    pub fn new(kind: SettingKind, value: f64) -> Result<Self> {
        kind.check(value)?;
        Ok(Self { kind, value })
    }

    pub fn kind(&self) -> SettingKind {
        self.kind
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

/// `F_r >= 2` values of one setting kind, kept in sampled order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingSet {
    kind: SettingKind,
    values: Vec<f64>,
    seed: u64,
}

impl SettingSet {
    pub fn new(kind: SettingKind, values: Vec<f64>, seed: u64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a setting set needs at least 2 values, got {}",
                values.len()
            )));
        }
        for &v in &values {
            kind.check(v)?;
        }
        Ok(Self { kind, values, seed })
    }

    pub fn kind(&self) -> SettingKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn settings(&self) -> impl Iterator<Item = CameraSetting> + '_ {
        self.values.iter().map(move |&value| CameraSetting {
            kind: self.kind,
            value,
        })
    }
}

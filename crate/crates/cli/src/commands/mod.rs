pub mod build;
pub mod embed;
pub mod eval;
pub mod plot;
pub mod sample;
pub mod simulate;

use std::path::Path;

use camsim::config::SimConfig;
use camsim::SettingKind;

pub enum Failure {
    /// Bad flags or flag values; exit code 1.
    Usage(String),
    /// Input data or processing failure; exit code 2.
    Data(camsim::Error),
}

impl From<camsim::Error> for Failure {
    fn from(e: camsim::Error) -> Self {
        Failure::Data(e)
    }
}

pub fn parse_kind(s: &str) -> Result<SettingKind, String> {
    s.parse::<SettingKind>().map_err(|e| e.to_string())
}

/// Checks a flag value against the kind's range; violations are usage errors.
pub fn check_value(kind: SettingKind, value: f64) -> Result<f64, Failure> {
    kind.check(value).map_err(|e| Failure::Usage(e.to_string()))
}

/// Config file (if any) with the environment override applied. Flags are
/// applied by the caller afterwards.
pub fn load_config(path: Option<&Path>) -> Result<SimConfig, Failure> {
    let cfg = match path {
        Some(p) => SimConfig::load(p)?,
        None => SimConfig::default(),
    };
    Ok(cfg.with_env_overrides())
}

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(camsim::Error::from)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Failure::Data(camsim::Error::io(path, e)))
}

//! Versioned JSON manifests describing built contrastive sets.
//!
//! Frame paths are relative to the directory holding the manifest. Fields
//! this version does not know about are kept verbatim and written back out.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::setting::{SettingKind, SettingSet};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub index: usize,
    pub value: f64,
    pub label: String,
    pub path: PathBuf,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastiveSet {
    pub set_id: String,
    pub base_image: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disparity: Option<PathBuf>,
    pub scene_description: String,
    pub kind: SettingKind,
    pub seed: u64,
    pub label: String,
    pub sim_config_hash: String,
    pub frames: Vec<FrameRecord>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl ContrastiveSet {
    pub fn values(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.value).collect()
    }

    pub fn setting_set(&self) -> Result<SettingSet> {
        SettingSet::new(self.kind, self.values(), self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedBase {
    pub base_image: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub master_seed: u64,
    pub config: SimConfig,
    pub sets: Vec<ContrastiveSet>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<SkippedBase>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl Manifest {
    pub fn new(master_seed: u64, config: SimConfig) -> Self {
        Self {
            schema_version: MANIFEST_SCHEMA_VERSION,
            master_seed,
            config,
            sets: Vec::new(),
            skipped: Vec::new(),
            extra: Map::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let found = value
            .get("schema_version")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidArgument("manifest has no schema_version".into()))?;
        if found != u64::from(MANIFEST_SCHEMA_VERSION) {
            return Err(Error::SchemaVersion {
                found: u32::try_from(found).unwrap_or(u32::MAX),
                expected: MANIFEST_SCHEMA_VERSION,
            });
        }
        Ok(serde_json::from_value(value)?)
    }

    /// Frame files listed in the manifest that do not exist under `root`, per set.
    pub fn missing_frames(&self, root: &Path) -> Vec<(String, Vec<PathBuf>)> {
        self.sets
            .iter()
            .filter_map(|s| {
                let missing: Vec<PathBuf> = s
                    .frames
                    .iter()
                    .map(|f| root.join(&f.path))
                    .filter(|p| !p.is_file())
                    .collect();
                (!missing.is_empty()).then(|| (s.set_id.clone(), missing))
            })
            .collect()
    }

    pub fn verify_frames(&self, root: &Path) -> Result<()> {
        let missing: Vec<PathBuf> = self.missing_frames(root).into_iter().flat_map(|(_, p)| p).collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::MissingFrames(missing))
        }
    }
}

pub fn write_manifest(path: impl AsRef<Path>, manifest: &Manifest) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, manifest.to_json()?).map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Manifest::from_json(&text)
}

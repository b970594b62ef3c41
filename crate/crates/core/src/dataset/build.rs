//! Contrastive set construction.
//!
//! Set `j` of a build uses base image `j mod N` (bases sorted by file name)
//! and seed `derive_frame_seed(master_seed, j)`. The set's values are drawn by
//! the sampler from that seed and frame `i` renders with
//! `derive_frame_seed(set_seed, i)`, so any frame can be rebuilt from the
//! manifest alone.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::Map;

use super::caption::CaptionSource;
use super::gate::check_gate;
use super::label::{format_label, format_set_label};
use super::manifest::{write_manifest, ContrastiveSet, FrameRecord, Manifest, SkippedBase, MANIFEST_FILE};
use crate::config::{GatePolicy, SimConfig};
use crate::error::{Error, Result};
use crate::image::ImagePlane;
use crate::metrics::SETTINGS_FILE;
use crate::sampler::sample_setting_set;
use crate::seed::derive_frame_seed;
use crate::setting::{SettingKind, SettingSet};
use crate::simulate::{find_disparity_sidecar, render_frame, Scene};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub kind: SettingKind,
    pub frames: usize,
    pub count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetOutcome {
    Built {
        set: ContrastiveSet,
        frames: Vec<ImagePlane>,
    },
    Skipped(SkippedBase),
}

/// PNG files in `dir`, sorted by name, excluding disparity and depth sidecars.
pub fn list_base_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let name = path.file_name().map(|n| n.to_string_lossy().to_lowercase()).unwrap_or_default();
        let sidecar = [".disparity.png", ".depth.png"].iter().any(|s| name.ends_with(s));
        if path.is_file() && name.ends_with(".png") && !sidecar {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

pub fn set_id(index: usize) -> String {
    format!("set_{index:05}")
}

pub fn frame_path(set_id: &str, index: usize) -> PathBuf {
    PathBuf::from(set_id).join(format!("frame_{index}.png"))
}

/// Renders one set in memory. A failed quality gate gives
/// [`SetOutcome::Skipped`] under the skip policy and an error under the
/// strict policy.
pub fn build_contrastive_set(
    base: &Path,
    id: &str,
    settings: &SettingSet,
    config: &SimConfig,
    captions: &dyn CaptionSource,
) -> Result<SetOutcome> {
    let kind = settings.kind();
    let scene = Scene::load(base, config)?;
    if let Some(reason) = check_gate(kind, &scene.image, scene.disparity.as_ref(), &config.quality_gates)? {
        match config.quality_gates.policy {
            GatePolicy::Strict => {
                return Err(Error::QualityGate {
                    path: base.to_path_buf(),
                    reason,
                })
            }
            GatePolicy::Warn => {
                tracing::warn!(set_id = id, base = %base.display(), %reason, "quality gate failed, building anyway");
            }
            GatePolicy::Skip => {
                tracing::warn!(set_id = id, base = %base.display(), %reason, "quality gate failed, skipping");
                return Ok(SetOutcome::Skipped(SkippedBase {
                    base_image: base.to_path_buf(),
                    reason,
                }));
            }
        }
    }
    let scene_description = captions.caption(base)?;
    let frames = settings
        .settings()
        .collect::<Vec<_>>()
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let frame = render_frame(&scene, s, config, derive_frame_seed(settings.seed(), i as u64))
                .map_err(|e| e.in_frame(i))?;
            tracing::debug!(set_id = id, frame_index = i, value = s.value(), "frame rendered");
            Ok(frame)
        })
        .collect::<Result<Vec<_>>>()?;
    let records = settings
        .values()
        .iter()
        .enumerate()
        .map(|(i, &value)| FrameRecord {
            index: i,
            value,
            label: format_label(kind, value),
            path: frame_path(id, i),
            extra: Map::new(),
        })
        .collect();
    let set = ContrastiveSet {
        set_id: id.to_string(),
        base_image: base.to_path_buf(),
        disparity: if kind == SettingKind::Bokeh { find_disparity_sidecar(base) } else { None },
        scene_description,
        kind,
        seed: settings.seed(),
        label: format_set_label(settings),
        sim_config_hash: config.hash(),
        frames: records,
        extra: Map::new(),
    };
    Ok(SetOutcome::Built { set, frames })
}

/// Builds `opts.count` sets from `bases` and writes frames plus
/// `manifest.json` under `out_dir`.
pub fn build_dataset(
    bases: &[PathBuf],
    opts: &BuildOptions,
    config: &SimConfig,
    captions: &dyn CaptionSource,
    out_dir: &Path,
) -> Result<Manifest> {
    config.validate()?;
    if bases.is_empty() {
        return Err(Error::InvalidArgument("no base images".into()));
    }
    if opts.frames < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 frames per set, got {}", opts.frames)));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let outcomes = (0..opts.count)
        .into_par_iter()
        .map(|j| -> Result<SetOutcome> {
            let id = set_id(j);
            let seed = derive_frame_seed(opts.seed, j as u64);
            let settings = sample_setting_set(opts.kind, opts.frames, seed)?;
            let outcome = build_contrastive_set(&bases[j % bases.len()], &id, &settings, config, captions)?;
            if let SetOutcome::Built { set, frames } = &outcome {
                write_set(out_dir, set, frames)?;
                tracing::info!(set_id = %id, frames = frames.len(), "set written");
            }
            Ok(outcome)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut manifest = Manifest::new(opts.seed, config.clone());
    for o in outcomes {
        match o {
            SetOutcome::Built { set, .. } => manifest.sets.push(set),
            SetOutcome::Skipped(s) => manifest.skipped.push(s),
        }
    }
    write_manifest(out_dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

fn write_set(out_dir: &Path, set: &ContrastiveSet, frames: &[ImagePlane]) -> Result<()> {
    let dir = out_dir.join(&set.set_id);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    for (record, frame) in set.frames.iter().zip(frames) {
        frame.write_png(out_dir.join(&record.path))?;
    }
    let settings = serde_json::json!({ "kind": set.kind, "values": set.values() });
    let path = dir.join(SETTINGS_FILE);
    std::fs::write(&path, format!("{settings:#}\n")).map_err(|e| Error::io(&path, e))
}

/// Re-renders frame `index` of `set` from its base image and the manifest's
/// configuration.
pub fn rebuild_frame(manifest: &Manifest, set: &ContrastiveSet, index: usize) -> Result<ImagePlane> {
    let record = set
        .frames
        .get(index)
        .ok_or_else(|| Error::InvalidArgument(format!("set {} has no frame {index}", set.set_id)))?;
    let scene = Scene::load(&set.base_image, &manifest.config)?;
    let setting = crate::setting::CameraSetting::new(set.kind, record.value)?;
    render_frame(&scene, setting, &manifest.config, derive_frame_seed(set.seed, index as u64))
}

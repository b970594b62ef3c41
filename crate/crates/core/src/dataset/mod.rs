//! Contrastive dataset construction: captions, quality gates, labels,
//! rendering and manifests.

mod build;
pub mod caption;
pub mod gate;
pub mod label;
pub mod manifest;

pub use build::{
    build_contrastive_set, build_dataset, frame_path, list_base_images, rebuild_frame, set_id, BuildOptions, SetOutcome,
};
pub use caption::{CaptionChain, CaptionSource, HttpCaptioner, SidecarCaptions};
pub use label::{format_label, format_set_label};
pub use manifest::{read_manifest, write_manifest, ContrastiveSet, FrameRecord, Manifest, MANIFEST_FILE};

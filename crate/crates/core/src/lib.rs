//! Physically based simulation of camera intrinsic settings.
//!
//! `camsim` renders contrastive frame sets of a fixed scene in which exactly
//! one camera setting varies (bokeh strength, focal length, shutter speed or
//! color temperature), builds the per-frame coarse camera embeddings consumed
//! by a camera encoder, and scores generated frame sets against physically
//! simulated references with a trend-correlation accuracy metric and a
//! frame-wise consistency metric.
//!
//! The crate is organised bottom-up:
//!
//! * [`image`], [`seed`], [`setting`], [`sensor`]: shared domain types.
//! * [`sampler`]: continuous sampling of setting values.
//! * [`colortemp`], [`exposure`], [`focal`], [`bokeh`]: the four simulators.
//! * [`simulate`]: rendering one setting from a base scene.
//! * [`embedding`]: coarse embeddings, difference features and the tensor file format.
//! * [`dataset`]: contrastive set construction and manifests.
//! * [`metrics`]: effect measurement, correlation, consistency and reports.

pub mod bokeh;
pub mod colortemp;
pub mod config;
pub mod dataset;
pub mod embedding;
mod error;
pub mod exposure;
pub mod focal;
pub mod image;
pub mod metrics;
pub mod resample;
pub mod sampler;
pub mod seed;
pub mod sensor;
pub mod setting;
pub mod simulate;

pub use error::{Error, Result};
pub use image::{Encoding, GrayPlane, ImagePlane};
pub use setting::{CameraSetting, SettingKind, SettingSet};

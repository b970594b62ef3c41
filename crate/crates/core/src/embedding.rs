//! Camera-encoder inputs: coarse embeddings and setting difference features.
//!
//! A coarse embedding holds one `C x H x W` block per frame:
//!
//! * Bokeh: constant `1 / K^2`;
//! * Focal: the crop-visibility mask, replicated over channels;
//! * Shutter: constant `s / 0.2`;
//! * ColorTemp: channel gains `(g_r, g_g, g_b)` in the first three channels,
//!   zeros after.
//!
//! Difference features embed each frame label with an [`EmbeddingProvider`]
//! and take `e[i + 1] - e[i]`; the last frame gets a zero vector.
//!
//! # Tensor files
//!
//! ```text
//! "CEMB"                 4 bytes
//! version                u16 LE (1)
//! f_r, c, h, w           u32 LE each
//! payload                f32 LE, frame-major, then channel, row, column
//! ```

use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::colortemp::channel_gains;
use crate::dataset::label::format_label;
use crate::error::{Error, Result};
use crate::focal::focal_mask;
use crate::seed::SplitMix64;
use crate::sensor::SensorSpec;
use crate::setting::{SettingKind, SettingSet};

pub const TENSOR_MAGIC: &[u8; 4] = b"CEMB";
pub const TENSOR_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 16;

/// Focal masks are rendered with at least this many pixels on the short side
/// before nearest-neighbour reduction to the embedding size.
pub const FOCAL_MASK_MIN_SIDE: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTensor {
    f_r: usize,
    c: usize,
    h: usize,
    w: usize,
    data: Vec<f32>,
}

impl EmbeddingTensor {
    pub fn new(f_r: usize, c: usize, h: usize, w: usize, data: Vec<f32>) -> Result<Self> {
        if f_r == 0 || c == 0 || h == 0 || w == 0 {
            return Err(Error::InvalidArgument(format!("tensor dims must be positive, got {f_r}x{c}x{h}x{w}")));
        }
        let len = f_r
            .checked_mul(c)
            .and_then(|v| v.checked_mul(h))
            .and_then(|v| v.checked_mul(w))
            .ok_or_else(|| Error::InvalidArgument("tensor dims overflow".into()))?;
        if data.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "{f_r}x{c}x{h}x{w} tensor needs {len} values, got {}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("tensor contains non-finite values".into()));
        }
        Ok(Self { f_r, c, h, w, data })
    }

    pub fn zeros(f_r: usize, c: usize, h: usize, w: usize) -> Result<Self> {
        Self::new(f_r, c, h, w, vec![0.0; f_r * c * h * w])
    }

    /// `(f_r, c, h, w)`.
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.f_r, self.c, self.h, self.w)
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn frame_len(&self) -> usize {
        self.c * self.h * self.w
    }

    pub fn frame(&self, i: usize) -> &[f32] {
        let n = self.frame_len();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn get(&self, frame: usize, ch: usize, y: usize, x: usize) -> f32 {
        self.data[((frame * self.c + ch) * self.h + y) * self.w + x]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.data.len() * 4);
        out.extend_from_slice(TENSOR_MAGIC);
        out.extend_from_slice(&TENSOR_VERSION.to_le_bytes());
        for d in [self.f_r, self.c, self.h, self.w] {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::TensorFormat(format!("{} bytes is shorter than the header", bytes.len())));
        }
        if &bytes[..4] != TENSOR_MAGIC {
            return Err(Error::TensorFormat("bad magic".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != TENSOR_VERSION {
            return Err(Error::TensorFormat(format!("unsupported version {version}")));
        }
        let dim = |k: usize| {
            let o = 6 + 4 * k;
            u32::from_le_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]]) as usize
        };
        let (f_r, c, h, w) = (dim(0), dim(1), dim(2), dim(3));
        let payload = &bytes[HEADER_LEN..];
        let expected = f_r.saturating_mul(c).saturating_mul(h).saturating_mul(w).saturating_mul(4);
        if payload.len() != expected {
            return Err(Error::TensorFormat(format!(
                "payload is {} bytes, dims {f_r}x{c}x{h}x{w} need {expected}",
                payload.len()
            )));
        }
        let data = payload
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        Self::new(f_r, c, h, w, data).map_err(|e| Error::TensorFormat(e.to_string()))
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

pub fn coarse_embedding(settings: &SettingSet, c: usize, h: usize, w: usize, spec: &SensorSpec) -> Result<EmbeddingTensor> {
    if c == 0 || h == 0 || w == 0 {
        return Err(Error::InvalidArgument(format!("embedding dims must be positive, got {c}x{h}x{w}")));
    }
    let kind = settings.kind();
    if kind == SettingKind::ColorTemp && c < 3 {
        return Err(Error::InvalidArgument(format!(
            "color temperature embeddings need at least 3 channels, got {c}"
        )));
    }
    let plane = h * w;
    let frames = settings
        .values()
        .par_iter()
        .map(|&v| -> Result<Vec<f32>> {
            Ok(match kind {
                SettingKind::Bokeh => vec![(1.0 / (v * v)) as f32; c * plane],
                SettingKind::Shutter => vec![(v / 0.2) as f32; c * plane],
                SettingKind::ColorTemp => {
                    let g = channel_gains(v)?;
                    let mut out = vec![0.0f32; c * plane];
                    for (ch, gain) in g.iter().enumerate() {
                        out[ch * plane..(ch + 1) * plane].fill(*gain as f32);
                    }
                    out
                }
                SettingKind::Focal => {
                    let k = FOCAL_MASK_MIN_SIDE.div_ceil(h.min(w));
                    let mask = focal_mask(v, spec, w * k, h * k)?.resize_nearest(w, h)?;
                    let block: Vec<f32> = mask.data().iter().map(|&m| m as f32).collect();
                    block.repeat(c)
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    EmbeddingTensor::new(settings.len(), c, h, w, frames.concat())
}

/// Text embedding service. Implementations must be deterministic per text and
/// return unit-norm vectors of length [`EmbeddingProvider::dim`].
pub trait EmbeddingProvider: Send + Sync {
    fn dim(&self) -> usize;
    fn embed(&self, text: &str) -> std::result::Result<Vec<f64>, String>;
}

/// Deterministic stand-in provider. The first 8 bytes of `SHA-256(text)`
/// (little endian) seed a SplitMix64 stream; component `k` is `2 u_k - 1`
/// with `u_k` the k-th uniform draw, and the vector is normalised to unit
/// length.
#[derive(Debug, Clone, Copy)]
pub struct HashEmbeddingProvider {
    pub dim: usize,
}

impl HashEmbeddingProvider {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl EmbeddingProvider for HashEmbeddingProvider {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> std::result::Result<Vec<f64>, String> {
        if self.dim == 0 {
            return Err("provider dimension is zero".into());
        }
        let digest = Sha256::digest(text.as_bytes());
        let mut seed = [0u8; 8];
        seed.copy_from_slice(&digest[..8]);
        let mut rng = SplitMix64::new(u64::from_le_bytes(seed));
        let mut v: Vec<f64> = (0..self.dim).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err("degenerate hash vector".into());
        }
        v.iter_mut().for_each(|x| *x /= norm);
        Ok(v)
    }
}

/// `e[i + 1] - e[i]` for each frame label, zero for the last frame.
pub fn setting_diff_features(settings: &SettingSet, provider: &dyn EmbeddingProvider) -> Result<Vec<Vec<f64>>> {
    let kind = settings.kind();
    let embeddings = settings
        .values()
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let e = provider
                .embed(&format_label(kind, v))
                .map_err(|message| Error::Provider { frame: i, message })?;
            if e.len() != provider.dim() {
                return Err(Error::Provider {
                    frame: i,
                    message: format!("expected {} values, got {}", provider.dim(), e.len()),
                });
            }
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut diffs: Vec<Vec<f64>> = embeddings
        .windows(2)
        .map(|p| p[1].iter().zip(&p[0]).map(|(b, a)| b - a).collect())
        .collect();
    diffs.push(vec![0.0; provider.dim()]);
    Ok(diffs)
}

/// Appends each frame's difference vector, truncated or zero-padded to
/// `c * h * w` and laid out channel-major, as `c` extra channels.
pub fn assemble_encoder_input(coarse: &EmbeddingTensor, diffs: &[Vec<f64>]) -> Result<EmbeddingTensor> {
    let (f_r, c, h, w) = coarse.dims();
    if diffs.len() != f_r {
        return Err(Error::DimensionMismatch(format!(
            "{} difference vectors for {f_r} frames",
            diffs.len()
        )));
    }
    let n = coarse.frame_len();
    let mut data = Vec::with_capacity(2 * n * f_r);
    for (i, d) in diffs.iter().enumerate() {
        data.extend_from_slice(coarse.frame(i));
        let start = data.len();
        data.extend(d.iter().take(n).map(|&v| v as f32));
        data.resize(start + n, 0.0);
    }
    EmbeddingTensor::new(f_r, 2 * c, h, w, data)
}

//! Floating-point RGB and single-channel image planes.
//!
//! Pixels are stored as `f64` in `[0, 1]`, row-major, RGB interleaved. 8-bit
//! PNG files map a byte `b` to `b / 255`; writing maps `v` back with
//! `floor(clamp(v, 0, 1) * 255 + 0.5)` (round half up).

use std::path::Path;

use ::image::{GrayImage, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Display gamma assumed for files that carry no metadata.
pub const DEFAULT_GAMMA: f64 = 2.2;

/// Rec.709 luma weights.
pub const REC709: [f64; 3] = [0.2126, 0.7152, 0.0722];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    /// Values are `linear^(1/gamma)`.
    Gamma(f64),
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImagePlane {
    width: usize,
    height: usize,
    data: Vec<f64>,
    encoding: Encoding,
}

impl ImagePlane {
    pub fn new(width: usize, height: usize, data: Vec<f64>, encoding: Encoding) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height * 3 {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} RGB image needs {} samples, got {}",
                width,
                height,
                width * height * 3,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite pixel value {bad}")));
        }
        if let Encoding::Gamma(g) = encoding {
            check_gamma(g)?;
        }
        Ok(Self {
            width,
            height,
            data,
            encoding,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [f64; 3], encoding: Encoding) -> Result<Self> {
        check_dims(width, height)?;
        let data = rgb.iter().copied().cycle().take(width * height * 3).collect();
        Self::new(width, height, data, encoding)
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        encoding: Encoding,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self::new(width, height, data, encoding)
    }

    /// Builds a plane without validation; callers guarantee the invariants.
    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<f64>, encoding: Encoding) -> Self {
        debug_assert_eq!(data.len(), width * height * 3);
        Self {
            width,
            height,
            data,
            encoding,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn same_size(&self, other_w: usize, other_h: usize) -> bool {
        self.width == other_w && self.height == other_h
    }

    pub fn with_encoding(mut self, encoding: Encoding) -> Self {
        self.encoding = encoding;
        self
    }

    pub fn luma(&self) -> GrayPlane {
        let data = self
            .data
            .chunks_exact(3)
            .map(|p| REC709[0] * p[0] + REC709[1] * p[1] + REC709[2] * p[2])
            .collect();
        GrayPlane::from_parts(self.width, self.height, data)
    }

    pub fn mean_luma(&self) -> f64 {
        let sum: f64 = self
            .data
            .chunks_exact(3)
            .map(|p| REC709[0] * p[0] + REC709[1] * p[1] + REC709[2] * p[2])
            .sum();
        sum / (self.width * self.height) as f64
    }

    pub fn channel_means(&self) -> [f64; 3] {
        let mut acc = [0.0; 3];
        for p in self.data.chunks_exact(3) {
            acc[0] += p[0];
            acc[1] += p[1];
            acc[2] += p[2];
        }
        let n = (self.width * self.height) as f64;
        acc.map(|s| s / n)
    }

    /// Decodes a gamma-encoded plane: `v -> v^gamma`.
    pub fn to_linear(&self) -> Result<ImagePlane> {
        let Encoding::Gamma(gamma) = self.encoding else {
            return Err(Error::Domain("image is already linear".into()));
        };
        let data = self.map_nonnegative(|v| v.powf(gamma))?;
        Ok(Self::from_parts(self.width, self.height, data, Encoding::Linear))
    }

    /// Encodes a linear plane: `v -> v^(1/gamma)`.
    pub fn from_linear(&self, gamma: f64) -> Result<ImagePlane> {
        check_gamma(gamma)?;
        if self.encoding != Encoding::Linear {
            return Err(Error::Domain("image is not linear".into()));
        }
        let inv = 1.0 / gamma;
        let data = self.map_nonnegative(|v| v.powf(inv))?;
        Ok(Self::from_parts(
            self.width,
            self.height,
            data,
            Encoding::Gamma(gamma),
        ))
    }

    fn map_nonnegative(&self, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        self.data
            .iter()
            .map(|&v| {
                if v < 0.0 {
                    Err(Error::Domain(format!("negative pixel value {v}")))
                } else {
                    Ok(f(v))
                }
            })
            .collect()
    }

    pub fn to_rgb8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize_u8(v)).collect()
    }

    pub fn from_rgb8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        let data = bytes.iter().map(|&b| f64::from(b) / 255.0).collect();
        Self::new(width, height, data, Encoding::Gamma(DEFAULT_GAMMA))
    }

    /// Reads an 8-bit PNG (any color type is converted to RGB).
    pub fn read_png(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let img = ::image::open(path).map_err(|e| Error::image(path, e))?.to_rgb8();
        Self::from_rgb8(img.width() as usize, img.height() as usize, img.as_raw())
    }

    pub fn write_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let buf = RgbImage::from_raw(self.width as u32, self.height as u32, self.to_rgb8())
            .expect("buffer length matches dimensions");
        let path = path.as_ref();
        buf.save_with_format(path, ::image::ImageFormat::Png)
            .map_err(|e| Error::image(path, e))?;
        Ok(())
    }
}

/// Single-channel plane used for depth, disparity and masks.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayPlane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayPlane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} plane needs {} samples, got {}",
                width,
                height,
                width * height,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample {bad}")));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Nearest-neighbour resampling (pixel centres mapped proportionally).
    pub fn resize_nearest(&self, width: usize, height: usize) -> Result<GrayPlane> {
        check_dims(width, height)?;
        let sx = self.width as f64 / width as f64;
        let sy = self.height as f64 / height as f64;
        GrayPlane::from_fn(width, height, |x, y| {
            let src_x = (((x as f64 + 0.5) * sx) as usize).min(self.width - 1);
            let src_y = (((y as f64 + 0.5) * sy) as usize).min(self.height - 1);
            self.get(src_x, src_y)
        })
    }

    /// Reads an 8-bit PNG as luma (`v / 255`).
    pub fn read_png(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let img = ::image::open(path).map_err(|e| Error::image(path, e))?.to_luma8();
        let data = img.as_raw().iter().map(|&b| f64::from(b) / 255.0).collect();
        Self::new(img.width() as usize, img.height() as usize, data)
    }

    pub fn write_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let bytes = self.data.iter().map(|&v| quantize_u8(v)).collect();
        let buf = GrayImage::from_raw(self.width as u32, self.height as u32, bytes)
            .expect("buffer length matches dimensions");
        let path = path.as_ref();
        buf.save_with_format(path, ::image::ImageFormat::Png)
            .map_err(|e| Error::image(path, e))?;
        Ok(())
    }
}

/// `floor(clamp(v, 0, 1) * 255 + 0.5)`.
pub fn quantize_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument(format!(
            "image dimensions must be at least 1x1, got {width}x{height}"
        )));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("gamma must be positive, got {gamma}")))
    }
}

//! Separable 3-lobe Lanczos resampling.
//!
//! Kernel: `L(x) = sinc(x) * sinc(x / 3)` for `|x| < 3`, zero elsewhere, with
//! `sinc(x) = sin(pi x) / (pi x)`. For a scale factor `s = in / out` the
//! kernel is stretched by `max(s, 1)` (antialiasing on downscale). Output
//! sample `i` is centred at `(i + 0.5) * s - 0.5` in source coordinates;
//! taps outside the source window are clamped to its edge and the weights of
//! each output sample are normalised to sum to one. Rows are filtered first,
//! then columns. Results are clipped to `[0, 1]`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::ImagePlane;

pub const LANCZOS_LOBES: f64 = 3.0;

/// Axis-aligned source window in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Window {
    pub fn full(width: usize, height: usize) -> Self {
        Self {
            x: 0,
            y: 0,
            width,
            height,
        }
    }

    pub fn contains(&self, other: &Window) -> bool {
        other.x >= self.x
            && other.y >= self.y
            && other.x + other.width <= self.x + self.width
            && other.y + other.height <= self.y + self.height
    }
}

pub fn lanczos3(x: f64) -> f64 {
    let x = x.abs();
    if x < 1e-12 {
        1.0
    } else if x < LANCZOS_LOBES {
        let px = std::f64::consts::PI * x;
        LANCZOS_LOBES * px.sin() * (px / LANCZOS_LOBES).sin() / (px * px)
    } else {
        0.0
    }
}

/// Precomputed taps for one axis: `(first source index, weights)` per output sample.
struct AxisTaps {
    taps: Vec<(usize, Vec<f64>)>,
}

impl AxisTaps {
    fn new(src_len: usize, dst_len: usize) -> Self {
        let scale = src_len as f64 / dst_len as f64;
        let stretch = scale.max(1.0);
        let support = LANCZOS_LOBES * stretch;
        let last = src_len as isize - 1;
        let taps = (0..dst_len)
            .map(|i| {
                let centre = (i as f64 + 0.5) * scale - 0.5;
                let lo = (centre - support).floor() as isize + 1;
                let hi = (centre + support).ceil() as isize - 1;
                // Clamped taps fold into the edge samples.
                let first = lo.clamp(0, last) as usize;
                let end = hi.clamp(0, last) as usize;
                let mut folded = vec![0.0; end - first + 1];
                for j in lo..=hi {
                    folded[j.clamp(0, last) as usize - first] += lanczos3((j as f64 - centre) / stretch);
                }
                let sum: f64 = folded.iter().sum();
                folded.iter_mut().for_each(|w| *w /= sum);
                (first, folded)
            })
            .collect();
        Self { taps }
    }
}

/// Resamples `window` of `src` to `out_w x out_h`. When the window already has
/// the output size the pixels are copied without filtering.
pub fn resize_window(src: &ImagePlane, window: Window, out_w: usize, out_h: usize) -> Result<ImagePlane> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::InvalidArgument("output size must be at least 1x1".into()));
    }
    if window.width == 0
        || window.height == 0
        || window.x + window.width > src.width()
        || window.y + window.height > src.height()
    {
        return Err(Error::DimensionMismatch(format!(
            "window {window:?} does not fit a {}x{} image",
            src.width(),
            src.height()
        )));
    }
    let sw = src.width();
    let data = src.data();
    if window.width == out_w && window.height == out_h {
        let mut out = Vec::with_capacity(out_w * out_h * 3);
        for y in window.y..window.y + window.height {
            let row = (y * sw + window.x) * 3;
            out.extend_from_slice(&data[row..row + window.width * 3]);
        }
        return Ok(ImagePlane::from_parts(out_w, out_h, out, src.encoding()));
    }

    let hx = AxisTaps::new(window.width, out_w);
    let hy = AxisTaps::new(window.height, out_h);

    // Horizontal pass over the window rows.
    let mut tmp = vec![0.0; out_w * window.height * 3];
    tmp.par_chunks_mut(out_w * 3).enumerate().for_each(|(r, dst)| {
        let y = window.y + r;
        let row = &data[(y * sw + window.x) * 3..(y * sw + window.x + window.width) * 3];
        for (px, (first, weights)) in dst.chunks_exact_mut(3).zip(&hx.taps) {
            for (k, w) in weights.iter().enumerate() {
                let p = (first + k) * 3;
                px[0] += w * row[p];
                px[1] += w * row[p + 1];
                px[2] += w * row[p + 2];
            }
        }
    });

    // Vertical pass.
    let mut out = vec![0.0; out_w * out_h * 3];
    out.par_chunks_mut(out_w * 3).zip(hy.taps.par_iter()).for_each(|(dst, (first, weights))| {
        for (k, w) in weights.iter().enumerate() {
            let src_row = &tmp[(first + k) * out_w * 3..(first + k + 1) * out_w * 3];
            for (d, s) in dst.iter_mut().zip(src_row) {
                *d += w * s;
            }
        }
        dst.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
    });
    Ok(ImagePlane::from_parts(out_w, out_h, out, src.encoding()))
}

//! Scale estimation between two frames of the same scene.
//!
//! A zoom by `s` compresses the magnitude spectrum by `s`, which becomes a
//! shift of `ln s` along the log-radius axis of a log-polar resampling of the
//! spectrum. The shift is found by phase correlation of the two log-polar
//! spectra.
//!
//! Only the shared field of view should contribute, so the frames are
//! apodised with centred Hann windows sized by the current estimate: the
//! wider frame keeps its central `1/s` portion, the narrower one is windowed
//! over its full extent. Starting from several initial guesses the estimate is
//! refined a few times and the guess with the strongest correlation peak wins.
//!
//! Steps for one refinement, with frames converted to Rec.709 luma and
//! zero-padded to an `n x n` square:
//!
//! 1. subtract the window-weighted mean, multiply by the window;
//! 2. `log(1 + |FFT|)`, DC moved to the centre;
//! 3. bilinear resampling on 256 log-spaced radii in `[2, 0.45 n]` and 256
//!    angles in `[0, pi)`;
//! 4. phase correlation with a Hann taper along log-radius, parabolic
//!    sub-bin peak refinement along log-radius, `s = exp(shift * dlogr)`.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{GrayPlane, ImagePlane};
use crate::resample::{resize_window, Window};

pub const SCALE_METHOD: &str = "log-polar magnitude-spectrum phase correlation";

/// Frames are downsampled so their long side is at most this before analysis.
pub const ANALYSIS_SIZE: usize = 512;
const LOG_POLAR_BINS: usize = 256;
const MIN_RADIUS: f64 = 2.0;
const MAX_RADIUS_FRACTION: f64 = 0.45;
const REFINEMENTS: usize = 4;
const START_SCALES: [f64; 7] = [1.0, 1.5, 1.0 / 1.5, 2.25, 1.0 / 2.25, 3.4, 1.0 / 3.4];
const SCALE_LIMIT: f64 = 8.0;
/// Correlation peaks below this are reported as unreliable.
pub const WEAK_PEAK: f64 = 0.06;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleEstimate {
    /// Magnification of `b` relative to `a` (greater than 1 when `b` is zoomed in).
    pub scale: f64,
    /// Height of the phase-correlation peak, 1 for a perfect match.
    pub peak: f64,
    pub warning: Option<String>,
}

/// Estimates how much `b` is magnified relative to `a`.
pub fn scale_factor(a: &ImagePlane, b: &ImagePlane) -> Result<ScaleEstimate> {
    if !a.same_size(b.width(), b.height()) {
        return Err(Error::DimensionMismatch(format!(
            "frames are {}x{} and {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    let fail = |reason: &str| Error::ScaleEstimation {
        from: 0,
        to: 1,
        reason: reason.to_string(),
    };
    if a.width() < 16 || a.height() < 16 {
        return Err(fail("frames smaller than 16x16"));
    }
    if a.data() == b.data() {
        return Ok(ScaleEstimate {
            scale: 1.0,
            peak: 1.0,
            warning: None,
        });
    }
    let ga = analysis_luma(a)?;
    let gb = analysis_luma(b)?;
    if variance(ga.data()) < 1e-10 || variance(gb.data()) < 1e-10 {
        return Err(fail("textureless frame"));
    }

    let analyser = Analyser::new(ga.width(), ga.height());
    let best = START_SCALES
        .par_iter()
        .map(|&s0| {
            let mut s = s0;
            let mut peak = 0.0;
            for _ in 0..REFINEMENTS {
                let la = analyser.log_polar(&ga, 1.0 / s.max(1.0));
                let lb = analyser.log_polar(&gb, s.min(1.0));
                let (shift, p) = analyser.phase_correlate(&la, &lb);
                s = (shift * analyser.dlogr).exp().clamp(1.0 / SCALE_LIMIT, SCALE_LIMIT);
                peak = p;
            }
            (s, peak)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((1.0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });

    let (scale, peak) = best;
    if !scale.is_finite() {
        return Err(fail("non-finite scale"));
    }
    let warning = (peak < WEAK_PEAK).then(|| format!("weak registration peak {peak:.4}"));
    if let Some(w) = &warning {
        tracing::warn!(scale, peak, "{w}");
    }
    Ok(ScaleEstimate { scale, peak, warning })
}

fn analysis_luma(img: &ImagePlane) -> Result<GrayPlane> {
    let long = img.width().max(img.height());
    if long <= ANALYSIS_SIZE {
        return Ok(img.luma());
    }
    let f = ANALYSIS_SIZE as f64 / long as f64;
    let w = ((img.width() as f64 * f).round() as usize).max(1);
    let h = ((img.height() as f64 * f).round() as usize).max(1);
    Ok(resize_window(img, Window::full(img.width(), img.height()), w, h)?.luma())
}

fn variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n
}

/// Centred Hann taper of `width` samples inside `n`.
fn hann_window(n: usize, width: f64) -> Vec<f64> {
    let c = (n as f64 - 1.0) / 2.0;
    (0..n)
        .map(|i| {
            let x = i as f64 - c;
            if x.abs() < width / 2.0 {
                0.5 + 0.5 * (2.0 * std::f64::consts::PI * x / width).cos()
            } else {
                0.0
            }
        })
        .collect()
}

fn fft2(buf: &mut [Complex<f64>], rows: usize, cols: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(cols), planner.plan_fft_inverse(rows))
    } else {
        (planner.plan_fft_forward(cols), planner.plan_fft_forward(rows))
    };
    buf.par_chunks_mut(cols).for_each(|r| row_fft.process(r));
    let mut t = vec![Complex::new(0.0, 0.0); rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            t[c * rows + r] = buf[r * cols + c];
        }
    }
    t.par_chunks_mut(rows).for_each(|c| col_fft.process(c));
    for c in 0..cols {
        for r in 0..rows {
            buf[r * cols + c] = t[c * rows + r];
        }
    }
}

struct Analyser {
    width: usize,
    height: usize,
    n: usize,
    dlogr: f64,
    /// Sample coordinates `(x, y)` in the centred spectrum, log-radius major.
    coords: Vec<(f64, f64)>,
    taper: Vec<f64>,
}

impl Analyser {
    fn new(width: usize, height: usize) -> Self {
        let n = width.max(height);
        let rmax = MAX_RADIUS_FRACTION * n as f64;
        let (lo, hi) = (MIN_RADIUS.ln(), rmax.ln());
        let dlogr = (hi - lo) / (LOG_POLAR_BINS - 1) as f64;
        let centre = (n / 2) as f64;
        let mut coords = Vec::with_capacity(LOG_POLAR_BINS * LOG_POLAR_BINS);
        for i in 0..LOG_POLAR_BINS {
            let r = (lo + i as f64 * dlogr).exp();
            for j in 0..LOG_POLAR_BINS {
                let t = std::f64::consts::PI * j as f64 / LOG_POLAR_BINS as f64;
                coords.push((centre + r * t.cos(), centre + r * t.sin()));
            }
        }
        let m = LOG_POLAR_BINS as f64 - 1.0;
        let taper = (0..LOG_POLAR_BINS)
            .map(|k| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / m).cos())
            .collect();
        Self {
            width,
            height,
            n,
            dlogr,
            coords,
            taper,
        }
    }

    /// Log-polar `log(1 + |FFT|)` of `img` windowed to `fraction` of its extent.
    fn log_polar(&self, img: &GrayPlane, fraction: f64) -> Vec<f64> {
        let (w, h, n) = (self.width, self.height, self.n);
        let wx = hann_window(w, w as f64 * fraction);
        let wy = hann_window(h, h as f64 * fraction);
        let d = img.data();
        let (mut num, mut den) = (0.0, 0.0);
        for y in 0..h {
            for x in 0..w {
                let k = wx[x] * wy[y];
                num += k * d[y * w + x];
                den += k;
            }
        }
        let mean = num / den;
        let (ox, oy) = ((n - w) / 2, (n - h) / 2);
        let mut buf = vec![Complex::new(0.0, 0.0); n * n];
        for y in 0..h {
            for x in 0..w {
                buf[(y + oy) * n + x + ox].re = (d[y * w + x] - mean) * wx[x] * wy[y];
            }
        }
        fft2(&mut buf, n, n, false);
        let half = n / 2;
        let mut mag = vec![0.0; n * n];
        for y in 0..n {
            for x in 0..n {
                mag[((y + half) % n) * n + (x + half) % n] = buf[y * n + x].norm().ln_1p();
            }
        }
        self.coords
            .iter()
            .map(|&(x, y)| {
                let (x0, y0) = (x.floor(), y.floor());
                let (fx, fy) = (x - x0, y - y0);
                let at = |xx: f64, yy: f64| {
                    if xx < 0.0 || yy < 0.0 || xx >= n as f64 || yy >= n as f64 {
                        0.0
                    } else {
                        mag[yy as usize * n + xx as usize]
                    }
                };
                at(x0, y0) * (1.0 - fx) * (1.0 - fy)
                    + at(x0 + 1.0, y0) * fx * (1.0 - fy)
                    + at(x0, y0 + 1.0) * (1.0 - fx) * fy
                    + at(x0 + 1.0, y0 + 1.0) * fx * fy
            })
            .collect()
    }

    /// Returns the sub-bin log-radius shift of `b` relative to `a` and the peak height.
    fn phase_correlate(&self, a: &[f64], b: &[f64]) -> (f64, f64) {
        let m = LOG_POLAR_BINS;
        let prep = |v: &[f64]| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let mut buf: Vec<Complex<f64>> = v
                .iter()
                .enumerate()
                .map(|(k, x)| Complex::new((x - mean) * self.taper[k / m], 0.0))
                .collect();
            fft2(&mut buf, m, m, false);
            buf
        };
        let fa = prep(a);
        let fb = prep(b);
        let mut cross: Vec<Complex<f64>> = fa
            .iter()
            .zip(&fb)
            .map(|(x, y)| {
                let c = x * y.conj();
                c / (c.norm() + 1e-12)
            })
            .collect();
        fft2(&mut cross, m, m, true);
        let norm = (m * m) as f64;
        let corr: Vec<f64> = cross.iter().map(|c| c.re / norm).collect();
        let (best, peak) = corr
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc });
        let (i, j) = (best / m, best % m);
        let ym = corr[((i + m - 1) % m) * m + j];
        let yp = corr[((i + 1) % m) * m + j];
        let curv = ym - 2.0 * peak + yp;
        let delta = if curv.abs() > 1e-15 { (ym - yp) / (2.0 * curv) } else { 0.0 };
        let mut shift = i as f64 + delta;
        if shift > m as f64 / 2.0 {
            shift -= m as f64;
        }
        (shift, peak)
    }
}

//! Perceptual distances between frames and frame-wise consistency.
//!
//! The built-in metric is DSSIM `(1 - SSIM) / 2` with SSIM computed per RGB
//! channel over every 8x8 window (stride 1, uniform weights, population
//! moments), constants `C1 = (0.01 L)^2`, `C2 = (0.03 L)^2`, `L = 1`, and
//! averaged over windows and channels. Learned metrics plug in through
//! [`CommandMetric`].

use std::path::PathBuf;
use std::process::Command;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::ImagePlane;

pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;
pub const SSIM_WINDOW: usize = 8;

pub trait PerceptualMetric: Send + Sync {
    fn name(&self) -> &str;
    fn distance(&self, a: &ImagePlane, b: &ImagePlane) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Dssim;

impl PerceptualMetric for Dssim {
    fn name(&self) -> &str {
        "dssim"
    }

    fn distance(&self, a: &ImagePlane, b: &ImagePlane) -> Result<f64> {
        Ok(((1.0 - ssim(a, b)?) / 2.0).max(0.0))
    }
}

/// Mean SSIM over channels and windows.
pub fn ssim(a: &ImagePlane, b: &ImagePlane) -> Result<f64> {
    if !a.same_size(b.width(), b.height()) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    if a.data() == b.data() {
        return Ok(1.0);
    }
    let (w, h) = (a.width(), a.height());
    let (ww, wh) = (SSIM_WINDOW.min(w), SSIM_WINDOW.min(h));
    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let area = (ww * wh) as f64;
    let (da, db) = (a.data(), b.data());
    let rows: Vec<f64> = (0..=h - wh)
        .into_par_iter()
        .map(|y0| {
            // Column sums of x, y, x^2, y^2, xy over the window rows.
            let mut cols = vec![[0.0f64; 5]; w * 3];
            for y in y0..y0 + wh {
                for i in 0..w * 3 {
                    let (x, v) = (da[y * w * 3 + i], db[y * w * 3 + i]);
                    let c = &mut cols[i];
                    c[0] += x;
                    c[1] += v;
                    c[2] += x * x;
                    c[3] += v * v;
                    c[4] += x * v;
                }
            }
            let mut total = 0.0;
            for x0 in 0..=w - ww {
                for ch in 0..3 {
                    let mut s = [0.0; 5];
                    for x in x0..x0 + ww {
                        let c = &cols[x * 3 + ch];
                        for k in 0..5 {
                            s[k] += c[k];
                        }
                    }
                    let (mx, my) = (s[0] / area, s[1] / area);
                    let vx = (s[2] / area - mx * mx).max(0.0);
                    let vy = (s[3] / area - my * my).max(0.0);
                    let cov = s[4] / area - mx * my;
                    total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
                }
            }
            total
        })
        .collect();
    let windows = ((h - wh + 1) * (w - ww + 1) * 3) as f64;
    Ok(rows.iter().sum::<f64>() / windows)
}

/// External metric: runs `program args.. a.png b.png` and parses the first
/// whitespace-separated token of stdout as the distance.
#[derive(Debug, Clone)]
pub struct CommandMetric {
    pub name: String,
    pub program: PathBuf,
    pub args: Vec<String>,
}

impl PerceptualMetric for CommandMetric {
    fn name(&self) -> &str {
        &self.name
    }

    fn distance(&self, a: &ImagePlane, b: &ImagePlane) -> Result<f64> {
        let dir = tempfile::tempdir().map_err(|e| Error::io(std::env::temp_dir(), e))?;
        let (pa, pb) = (dir.path().join("a.png"), dir.path().join("b.png"));
        a.write_png(&pa)?;
        b.write_png(&pb)?;
        let mut cmd = Command::new(&self.program);
        cmd.args(&self.args).arg(&pa).arg(&pb);
        run_for_number(cmd)
    }
}

pub(crate) fn run_for_number(mut cmd: Command) -> Result<f64> {
    let out = cmd
        .output()
        .map_err(|e| Error::Plugin(format!("cannot run {:?}: {e}", cmd.get_program())))?;
    if !out.status.success() {
        return Err(Error::Plugin(format!(
            "{:?} exited with {}: {}",
            cmd.get_program(),
            out.status,
            String::from_utf8_lossy(&out.stderr).trim()
        )));
    }
    let stdout = String::from_utf8_lossy(&out.stdout);
    stdout
        .split_whitespace()
        .next()
        .and_then(|t| t.parse::<f64>().ok())
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Plugin(format!("expected a number on stdout, got {:?}", stdout.trim())))
}

/// Mean distance over adjacent frame pairs.
pub fn consistency_score(frames: &[ImagePlane], metric: &dyn PerceptualMetric) -> Result<f64> {
    if frames.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "consistency needs at least two frames, got {}",
            frames.len()
        )));
    }
    let d = frames
        .par_windows(2)
        .enumerate()
        .map(|(i, p)| metric.distance(&p[0], &p[1]).map_err(|e| e.in_frame(i + 1)))
        .collect::<Result<Vec<_>>>()?;
    Ok(d.iter().sum::<f64>() / d.len() as f64)
}

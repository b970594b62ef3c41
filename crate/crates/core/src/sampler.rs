//! Continuous sampling of camera-setting values.
//!
//! Values are drawn i.i.d. uniform on the raw scale of each setting kind and
//! kept in draw order. A uniform grid snap reproduces the discrete-sampling
//! baseline.

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;
use crate::setting::{SettingKind, SettingSet};

pub fn sample_setting_set(kind: SettingKind, f_r: usize, seed: u64) -> Result<SettingSet> {
    if f_r < 2 {
        return Err(Error::InvalidArgument(format!("frame count must be at least 2, got {f_r}")));
    }
    let (lo, hi) = kind.range();
    let mut rng = rng_from_seed(seed);
    let values = (0..f_r)
        .map(|_| {
            let u: f64 = rng.random();
            (lo + (hi - lo) * u).min(hi)
        })
        .collect();
    SettingSet::new(kind, values, seed)
}

/// Grid point `k` of `n_bins` uniformly spaced points over the kind's range.
pub fn grid_point(kind: SettingKind, n_bins: usize, k: usize) -> f64 {
    let (lo, hi) = kind.range();
    if k + 1 == n_bins {
        hi
    } else {
        lo + k as f64 * (hi - lo) / (n_bins - 1) as f64
    }
}

/// Index of the grid point nearest to `value`; exact midpoints go to the
/// lower index.
pub fn nearest_grid_index(kind: SettingKind, n_bins: usize, value: f64) -> usize {
    let (lo, hi) = kind.range();
    let t = (value - lo) / (hi - lo) * (n_bins - 1) as f64;
    let k = t.floor().clamp(0.0, (n_bins - 1) as f64) as usize;
    if k + 1 >= n_bins {
        return n_bins - 1;
    }
    let below = (value - grid_point(kind, n_bins, k)).abs();
    let above = (grid_point(kind, n_bins, k + 1) - value).abs();
    if above < below {
        k + 1
    } else {
        k
    }
}

pub fn discretize_setting_set(set: &SettingSet, n_bins: usize) -> Result<SettingSet> {
    if n_bins < 2 {
        return Err(Error::InvalidArgument(format!("bin count must be at least 2, got {n_bins}")));
    }
    let kind = set.kind();
    let values = set
        .values()
        .iter()
        .map(|&v| grid_point(kind, n_bins, nearest_grid_index(kind, n_bins, v)))
        .collect();
    SettingSet::new(kind, values, set.seed())
}

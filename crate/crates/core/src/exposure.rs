//! Shutter-speed simulation through a sensor imaging model.
//!
//! A gamma-encoded base image is decoded to normalised irradiance
//! `H = base^gamma`. A shutter value `t` scales the exposure by
//! `m = t / base_exposure`. In deterministic mode the frame is
//! `min(1, m * H)^(1/gamma)`. In stochastic mode each channel sample goes
//! through photon shot noise, full-well clipping, read noise and an ADC:
//!
//! ```text
//! lambda   = QE * (m * H * photon_scale + t * dark_current)
//! e        = min(Poisson(lambda), full_well)
//! dn       = clamp(round(gain * (e + N(0, read_noise^2))), 0, 2^bits - 1)
//! linear   = clamp(dn / (gain * QE * photon_scale), 0, 1)
//! L        = linear^(1/gamma)
//! ```
//!
//! Poisson variates are exact below `lambda = 256` and use
//! `round(max(0, lambda + sqrt(lambda) * z))` with `z ~ N(0, 1)` above.
//! Pixel `i` of a frame draws from its own ChaCha8 stream seeded with
//! `derive_frame_seed(frame_seed, i)`.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Encoding, ImagePlane};
use crate::metrics::EffectSeries;
use crate::seed::{derive_frame_seed, rng_from_seed};
use crate::sensor::SensorModel;
use crate::setting::SettingKind;

/// Switch-over point from exact Poisson sampling to the normal approximation.
pub const POISSON_EXACT_LIMIT: f64 = 256.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ExposureMode {
    Deterministic,
    Stochastic { seed: u64 },
}

/// `H = base^gamma`, using the model's gamma.
pub fn recover_irradiance(base: &ImagePlane, model: &SensorModel) -> Result<ImagePlane> {
    model.validate()?;
    if base.encoding() == Encoding::Linear {
        return Err(Error::Domain("base image must be gamma encoded".into()));
    }
    base.clone().with_encoding(Encoding::Gamma(model.gamma)).to_linear()
}

pub fn exposure_multiplier(shutter: f64, model: &SensorModel) -> f64 {
    shutter / model.base_exposure
}

pub fn simulate_exposure(
    base: &ImagePlane,
    shutter: f64,
    model: &SensorModel,
    mode: ExposureMode,
) -> Result<ImagePlane> {
    SettingKind::Shutter.check(shutter)?;
    let irradiance = recover_irradiance(base, model)?;
    let m = exposure_multiplier(shutter, model);
    match mode {
        ExposureMode::Deterministic => {
            if m == 1.0 {
                // Exact identity; the power-law round trip is not bit-exact.
                return Ok(base.clone());
            }
            let inv = 1.0 / model.gamma;
            let data = irradiance
                .data()
                .iter()
                .map(|&h| (m * h).min(1.0).powf(inv))
                .collect();
            Ok(ImagePlane::from_parts(
                base.width(),
                base.height(),
                data,
                Encoding::Gamma(model.gamma),
            ))
        }
        ExposureMode::Stochastic { seed } => {
            let data = stochastic_linear(&irradiance, shutter, model, seed)
                .into_iter()
                .map(|v| v.powf(1.0 / model.gamma))
                .collect();
            Ok(ImagePlane::from_parts(
                base.width(),
                base.height(),
                data,
                Encoding::Gamma(model.gamma),
            ))
        }
    }
}

/// Linear-light stochastic samples for every channel of `irradiance`.
fn stochastic_linear(irradiance: &ImagePlane, shutter: f64, model: &SensorModel, seed: u64) -> Vec<f64> {
    let m = exposure_multiplier(shutter, model);
    let read = Normal::new(0.0, model.read_noise).expect("read noise validated non-negative");
    let adc_max = model.adc_max();
    let mut out = vec![0.0; irradiance.data().len()];
    out.par_chunks_mut(3)
        .zip(irradiance.data().par_chunks(3))
        .enumerate()
        .for_each(|(i, (dst, src))| {
            let mut rng = rng_from_seed(derive_frame_seed(seed, i as u64));
            for (d, &h) in dst.iter_mut().zip(src) {
                let lambda = model.quantum_efficiency
                    * (m * h * model.photon_scale + shutter * model.dark_current);
                let electrons = sample_poisson(&mut rng, lambda).min(model.full_well);
                let noisy = electrons + read.sample(&mut rng);
                let dn = (model.conversion_gain * noisy).round().clamp(0.0, adc_max);
                *d = model.normalised(dn).clamp(0.0, 1.0);
            }
        });
    out
}

pub fn sample_poisson<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        0.0
    } else if lambda < POISSON_EXACT_LIMIT {
        Poisson::new(lambda).expect("positive finite rate").sample(rng)
    } else {
        let z: f64 = StandardNormal.sample(rng);
        (lambda + lambda.sqrt() * z).max(0.0).round()
    }
}

/// Mean Rec.709 luma of the deterministic frame for each shutter value.
pub fn exposure_trend(base: &ImagePlane, shutters: &[f64], model: &SensorModel) -> Result<EffectSeries> {
    if shutters.is_empty() {
        return Err(Error::InvalidArgument("no shutter values".into()));
    }
    let values = shutters
        .iter()
        .map(|&s| Ok(simulate_exposure(base, s, model, ExposureMode::Deterministic)?.mean_luma()))
        .collect::<Result<Vec<_>>>()?;
    Ok(EffectSeries::scalar(SettingKind::Shutter, values))
}

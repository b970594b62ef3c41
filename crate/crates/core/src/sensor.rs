//! Sensor geometry and the photometric sensor model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical sensor size and the focal length base images were captured at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorSpec {
    /// Sensor width in mm.
    pub width_mm: f64,
    /// Sensor height in mm.
    pub height_mm: f64,
    /// Focal length of the base capture in mm.
    pub base_focal_mm: f64,
}

impl SensorSpec {
    pub fn new(width_mm: f64, height_mm: f64, base_focal_mm: f64) -> Result<Self> {
        let spec = Self {
            width_mm,
            height_mm,
            base_focal_mm,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sensor width", self.width_mm),
            ("sensor height", self.height_mm),
            ("base focal length", self.base_focal_mm),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for SensorSpec {
    /// Full-frame 36x24 mm behind a 24 mm lens.
    fn default() -> Self {
        Self {
            width_mm: 36.0,
            height_mm: 24.0,
            base_focal_mm: 24.0,
        }
    }
}

/// Parameters of the imaging model
/// `L = ADC{ xi * Clip{Poisson(t * QE * (H + mu_dark))} + N(0, sigma_read^2) }^(1/gamma)`.
///
/// `photon_scale` fixes absolute photon units: a pixel with normalised
/// irradiance `H = 1` collects `photon_scale` photons over the base exposure
/// time. The full-scale signal (`H = 1` at the base exposure) therefore holds
/// `QE * photon_scale` electrons, and [`SensorModel::normalised`] divides by
/// exactly that amount so the noise-free model reduces to `L = (m * H)^(1/gamma)`
/// with `m = t / base_exposure`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorModel {
    /// DN per electron.
    pub conversion_gain: f64,
    /// Electrons per photon, in `(0, 1]`.
    pub quantum_efficiency: f64,
    /// Electrons per second.
    pub dark_current: f64,
    /// Read noise standard deviation in electrons.
    pub read_noise: f64,
    pub gamma: f64,
    /// Electrons.
    pub full_well: f64,
    pub adc_bits: u32,
    /// Seconds.
    pub base_exposure: f64,
    /// Photons collected at `H = 1` over `base_exposure`.
    pub photon_scale: f64,
}

pub const DEFAULT_PHOTON_SCALE: f64 = 10_000.0;

impl Default for SensorModel {
    fn default() -> Self {
        SensorModel::calibrated(0.6, DEFAULT_PHOTON_SCALE, 10)
            .with_noise(0.01, 2.0)
    }
}

impl SensorModel {
    /// Full well at the full-scale signal and a conversion gain that maps it
    /// to the top ADC code.
    pub fn calibrated(quantum_efficiency: f64, photon_scale: f64, adc_bits: u32) -> Self {
        let full_well = quantum_efficiency * photon_scale;
        Self {
            conversion_gain: adc_max(adc_bits) / full_well,
            quantum_efficiency,
            dark_current: 0.0,
            read_noise: 0.0,
            gamma: crate::image::DEFAULT_GAMMA,
            full_well,
            adc_bits,
            base_exposure: 0.2,
            photon_scale,
        }
    }

    pub fn with_noise(mut self, dark_current: f64, read_noise: f64) -> Self {
        self.dark_current = dark_current;
        self.read_noise = read_noise;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("conversion_gain", self.conversion_gain),
            ("quantum_efficiency", self.quantum_efficiency),
            ("gamma", self.gamma),
            ("full_well", self.full_well),
            ("base_exposure", self.base_exposure),
            ("photon_scale", self.photon_scale),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!("sensor {name} must be positive, got {v}")));
            }
        }
        // Zero noise terms are accepted: they are the noise-free limit.
        for (name, v) in [("dark_current", self.dark_current), ("read_noise", self.read_noise)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!("sensor {name} must be non-negative, got {v}")));
            }
        }
        if self.quantum_efficiency > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "quantum efficiency must be at most 1, got {}",
                self.quantum_efficiency
            )));
        }
        if !(1..=16).contains(&self.adc_bits) {
            return Err(Error::InvalidArgument(format!(
                "adc_bits must be in 1..=16, got {}",
                self.adc_bits
            )));
        }
        Ok(())
    }

    pub fn adc_max(&self) -> f64 {
        adc_max(self.adc_bits)
    }

    /// Converts a digital number back to normalised linear intensity.
    pub fn normalised(&self, dn: f64) -> f64 {
        dn / (self.conversion_gain * self.quantum_efficiency * self.photon_scale)
    }
}

fn adc_max(bits: u32) -> f64 {
    ((1u32 << bits) - 1) as f64
}

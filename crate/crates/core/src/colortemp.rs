//! Kelvin to RGB mapping and white-balance style channel gains.
//!
//! The mapping is an empirical blackbody fit evaluated on `temp = kelvin / 100`
//! with natural logarithms, in three regimes:
//!
//! ```text
//! temp <= 66:       R = 255
//!                   G = max(0, 99.47 ln(temp) - 161.12)
//!                   B = max(0, 138.52 ln(temp - 10) - 305.04)
//! 66 < temp <= 88:  R = 0.5 (255 + 329.70 (temp - 60)^-0.1933)
//!                   G = 0.5 (288.12 (temp - 60)^-0.1155 + 99.47 ln(temp) - 161.12)
//!                   B = 0.5 (138.52 ln(temp - 10) - 305.04 + 255)
//! temp > 88:        R = 329.70 (temp - 60)^-0.1933
//!                   G = 288.12 (temp - 60)^-0.1155
//!                   B = 255
//! ```
//!
//! followed by a final clip to `[0, 255]`. The middle regime averages the two
//! outer ones, so the curve jumps at `temp = 66` and `temp = 88`; the jumps
//! are kept as is.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};
use crate::image::ImagePlane;
use crate::setting::SettingKind;

pub const KELVIN_DOMAIN: (f64, f64) = (1000.0, 40000.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RgbTriple {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl RgbTriple {
    pub fn to_array(self) -> [f64; 3] {
        [self.r, self.g, self.b]
    }

    /// Per-channel gains `c / 255`.
    pub fn gains(self) -> [f64; 3] {
        self.to_array().map(|c| c / 255.0)
    }
}

pub fn kelvin_to_rgb(kelvin: f64) -> Result<RgbTriple> {
    check_range("kelvin", kelvin, KELVIN_DOMAIN.0, KELVIN_DOMAIN.1)?;
    let temp = kelvin / 100.0;
    let (r, g, b) = if temp <= 66.0 {
        (255.0, warm_green(temp), warm_blue(temp))
    } else if temp <= 88.0 {
        (
            0.5 * (255.0 + cool_red(temp)),
            0.5 * (288.12 * (temp - 60.0).powf(-0.1155) + 99.47 * temp.ln() - 161.12),
            0.5 * (138.52 * (temp - 10.0).ln() - 305.04 + 255.0),
        )
    } else {
        (cool_red(temp), cool_green(temp), 255.0)
    };
    Ok(RgbTriple {
        r: r.clamp(0.0, 255.0),
        g: g.clamp(0.0, 255.0),
        b: b.clamp(0.0, 255.0),
    })
}

fn warm_green(temp: f64) -> f64 {
    (99.47 * temp.ln() - 161.12).max(0.0)
}

fn warm_blue(temp: f64) -> f64 {
    // ln(0) = -inf at temp = 10, which the max() maps to 0.
    (138.52 * (temp - 10.0).ln() - 305.04).max(0.0)
}

fn cool_red(temp: f64) -> f64 {
    329.70 * (temp - 60.0).powf(-0.1933)
}

fn cool_green(temp: f64) -> f64 {
    288.12 * (temp - 60.0).powf(-0.1155)
}

pub fn channel_gains(kelvin: f64) -> Result<[f64; 3]> {
    Ok(kelvin_to_rgb(kelvin)?.gains())
}

/// Multiplies every pixel by the gains for `kelvin`, in the image's own
/// encoding, and clips to `[0, 1]`.
pub fn apply_color_temperature(img: &ImagePlane, kelvin: f64) -> Result<ImagePlane> {
    SettingKind::ColorTemp.check(kelvin)?;
    Ok(apply_gains(img, channel_gains(kelvin)?))
}

pub(crate) fn apply_gains(img: &ImagePlane, gains: [f64; 3]) -> ImagePlane {
    let data = img
        .data()
        .chunks_exact(3)
        .flat_map(|p| {
            [
                (p[0] * gains[0]).clamp(0.0, 1.0),
                (p[1] * gains[1]).clamp(0.0, 1.0),
                (p[2] * gains[2]).clamp(0.0, 1.0),
            ]
        })
        .collect();
    ImagePlane::from_parts(img.width(), img.height(), data, img.encoding())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Encoding;

    fn close(a: RgbTriple, b: [f64; 3], tol: f64) -> bool {
        a.to_array().iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    // Reference triples from 40-digit evaluation of the fit.
    #[test]
    fn reference_temperatures() {
        let t = kelvin_to_rgb(2000.0).unwrap();
        assert!(close(t, [255.0, 136.865_489_250_415, 13.914_087_081_535_2], 1e-9), "{t:?}");
        let t = kelvin_to_rgb(6600.0).unwrap();
        assert!(close(t, [255.0, 255.0, 252.551_716_200_633], 1e-9), "{t:?}");
        let t = kelvin_to_rgb(10000.0).unwrap();
        assert!(close(t, [161.599_774_650_649, 188.163_540_896_074, 255.0], 1e-9), "{t:?}");
    }

    #[test]
    fn domain_is_enforced() {
        assert!(kelvin_to_rgb(999.0).is_err());
        assert!(kelvin_to_rgb(40001.0).is_err());
        assert!(kelvin_to_rgb(f64::NAN).is_err());
        let lowest = kelvin_to_rgb(1000.0).unwrap();
        assert_eq!(lowest.b, 0.0);
        assert!(kelvin_to_rgb(40000.0).is_ok());
    }

    #[test]
    fn white_at_2000k_takes_the_gains() {
        let img = ImagePlane::filled(3, 2, [1.0; 3], Encoding::Gamma(2.2)).unwrap();
        let out = apply_color_temperature(&img, 2000.0).unwrap();
        let p = out.pixel(1, 1);
        assert!((p[0] - 1.0).abs() < 1e-3);
        assert!((p[1] - 0.5367).abs() < 1e-3);
        assert!((p[2] - 0.0545).abs() < 1e-3);
    }

    #[test]
    fn black_stays_black() {
        let img = ImagePlane::filled(2, 2, [0.0; 3], Encoding::Gamma(2.2)).unwrap();
        for k in [2000.0, 5000.0, 10000.0] {
            assert!(apply_color_temperature(&img, k).unwrap().data().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn unit_gain_leaves_image_unchanged() {
        // No temperature in the fit reaches (255, 255, 255), so exercise the
        // gain path directly.
        let img = ImagePlane::from_fn(4, 4, Encoding::Gamma(2.2), |x, y| {
            [x as f64 / 4.0, y as f64 / 4.0, 0.3]
        })
        .unwrap();
        let gains = RgbTriple { r: 255.0, g: 255.0, b: 255.0 }.gains();
        assert_eq!(apply_gains(&img, gains), img);
    }

    #[test]
    fn cooler_is_bluer() {
        let warm = kelvin_to_rgb(2000.0).unwrap();
        let cool = kelvin_to_rgb(10000.0).unwrap();
        assert!(cool.b / cool.r > warm.b / warm.r);
    }

    #[test]
    fn gains_never_exceed_one() {
        let img = ImagePlane::filled(2, 2, [0.8, 0.6, 0.9], Encoding::Gamma(2.2)).unwrap();
        for k in (2000..=10000).step_by(250) {
            let out = apply_color_temperature(&img, k as f64).unwrap();
            for (o, i) in out.data().iter().zip(img.data()) {
                assert!(*o <= *i && *o >= 0.0);
            }
        }
    }

    #[test]
    fn apply_rejects_out_of_range_setting() {
        let img = ImagePlane::filled(1, 1, [1.0; 3], Encoding::Gamma(2.2)).unwrap();
        assert!(apply_color_temperature(&img, 1500.0).is_err());
    }
}

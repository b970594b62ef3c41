//! Acceptance suite. Each criterion runs in order and prints one PASS/FAIL
//! line to stderr (uncaptured), then the test fails if any criterion did.
//!
//! Run with `cargo test -p camsim --test acceptance`.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use dashu_float::DBig;

use camsim::bokeh::{pick_focus_disparity, render_bokeh, BokehParams, DisparityMap, DEFAULT_FOCUS_PERCENTILE};
use camsim::colortemp::kelvin_to_rgb;
use camsim::config::SimConfig;
use camsim::dataset::{
    build_dataset, format_label, read_manifest, write_manifest, BuildOptions, CaptionChain, Manifest, SidecarCaptions,
    MANIFEST_FILE,
};
use camsim::embedding::{coarse_embedding, setting_diff_features, EmbeddingProvider, EmbeddingTensor, HashEmbeddingProvider};
use camsim::exposure::{simulate_exposure, ExposureMode};
use camsim::focal::{crop_fraction, crop_window, fov, FovAxis};
use camsim::metrics::{
    evaluate_frames, mean_abs_laplacian, measure_effect, pearson, trend_corrcoef,
    ColorTempReduction, Dssim, EffectSeries, EvalOptions, MeasureOptions,
};
use camsim::sampler::{discretize_setting_set, grid_point, sample_setting_set};
use camsim::seed::{derive_frame_seed, SplitMix64};
use camsim::sensor::{SensorModel, SensorSpec};
use camsim::simulate::{bokeh_params, render_frame, Scene};
use camsim::{CameraSetting, Encoding, GrayPlane, ImagePlane, SettingKind, SettingSet};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- fixtures

/// Dead-leaves texture: occluding discs with a `r^-3` size density, gray
/// levels uniform. Scale-invariant statistics make it a fair registration
/// target at any zoom.
fn dead_leaves(w: usize, h: usize, count: usize, seed: u64) -> ImagePlane {
    let mut rng = SplitMix64::new(seed);
    let mut v = vec![[0.5; 3]; w * h];
    let (rmin, rmax) = (2.0f64, w.min(h) as f64 / 10.0);
    for _ in 0..count {
        let u = rng.next_f64();
        let r = (rmin.powi(-2) + u * (rmax.powi(-2) - rmin.powi(-2))).powf(-0.5);
        let cx = rng.next_f64() * w as f64;
        let cy = rng.next_f64() * h as f64;
        let g = rng.next_f64();
        let c = [g, 0.15 + 0.7 * rng.next_f64() * g, 1.0 - g];
        let (x0, x1) = ((cx - r).max(0.0) as usize, ((cx + r + 1.0) as usize).min(w));
        let (y0, y1) = ((cy - r).max(0.0) as usize, ((cy + r + 1.0) as usize).min(h));
        for y in y0..y1 {
            for x in x0..x1 {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                if dx * dx + dy * dy <= r * r {
                    v[y * w + x] = c;
                }
            }
        }
    }
    ImagePlane::from_fn(w, h, Encoding::Gamma(2.2), |x, y| v[y * w + x]).unwrap()
}

fn noise_image(w: usize, h: usize, seed: u64) -> ImagePlane {
    let mut rng = SplitMix64::new(seed);
    ImagePlane::from_fn(w, h, Encoding::Gamma(2.2), |_, _| [rng.next_f64(), rng.next_f64(), rng.next_f64()]).unwrap()
}

/// Near disc (d = 0.9) over a receding background ramp (0.1 at the top to
/// 0.5 at the bottom).
fn disc_over_ramp(w: usize, h: usize) -> DisparityMap {
    let (cx, cy, r) = (w as f64 / 2.0, h as f64 / 2.0, w.min(h) as f64 * 0.3);
    let plane = GrayPlane::from_fn(w, h, |x, y| {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        if dx * dx + dy * dy <= r * r {
            0.9
        } else {
            0.1 + 0.4 * y as f64 / (h - 1) as f64
        }
    })
    .unwrap();
    DisparityMap::new(plane).unwrap()
}

// ---------------------------------------------------------------- AC1, AC2

const ORACLE_DIGITS: usize = 30;

fn dec(s: &str) -> DBig {
    DBig::from_str(s).unwrap().with_precision(ORACLE_DIGITS).value()
}

/// Kelvin as an exact decimal, divided by 100.
fn oracle_temp(kelvin: &str) -> DBig {
    dec(kelvin) / dec("100")
}

fn pow(base: &DBig, exp: &str) -> DBig {
    base.powf(&dec(exp))
}

fn dmax0(v: DBig) -> DBig {
    if v < dec("0") {
        dec("0")
    } else {
        v
    }
}

/// The three regimes, evaluated as written (inner max(0, .) terms only where
/// they appear), before the final clip.
fn oracle_warm(t: &DBig) -> [DBig; 3] {
    [
        dec("255"),
        dmax0(dec("99.47") * t.ln() - dec("161.12")),
        dmax0(dec("138.52") * (t - dec("10")).ln() - dec("305.04")),
    ]
}

fn oracle_middle(t: &DBig) -> [DBig; 3] {
    let t60 = t - dec("60");
    [
        dec("0.5") * (dec("255") + dec("329.70") * pow(&t60, "-0.1933")),
        dec("0.5") * (dec("288.12") * pow(&t60, "-0.1155") + dec("99.47") * t.ln() - dec("161.12")),
        dec("0.5") * (dec("138.52") * (t - dec("10")).ln() - dec("305.04") + dec("255")),
    ]
}

fn oracle_cool(t: &DBig) -> [DBig; 3] {
    let t60 = t - dec("60");
    [dec("329.70") * pow(&t60, "-0.1933"), dec("288.12") * pow(&t60, "-0.1155"), dec("255")]
}

fn clip_f64(v: [DBig; 3]) -> [f64; 3] {
    v.map(|c| c.to_f64().value().clamp(0.0, 255.0))
}

fn oracle_rgb(kelvin: u32) -> [f64; 3] {
    let t = oracle_temp(&kelvin.to_string());
    let regime = if kelvin <= 6600 {
        oracle_warm(&t)
    } else if kelvin <= 8800 {
        oracle_middle(&t)
    } else {
        oracle_cool(&t)
    };
    clip_f64(regime)
}

fn max_abs_diff(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn ac1() -> Check {
    let grid: Vec<u32> = (2000..=10000).collect();
    let start = Instant::now();
    let ours: Vec<[f64; 3]> = grid.iter().map(|&k| kelvin_to_rgb(f64::from(k)).unwrap().to_array()).collect();
    let elapsed = start.elapsed();

    let mut worst = (0.0f64, 0u32);
    for (&k, got) in grid.iter().zip(&ours) {
        let err = max_abs_diff(*got, oracle_rgb(k));
        if err > worst.0 {
            worst = (err, k);
        }
    }
    ensure(worst.0 <= 1e-6, || format!("max |err| {:.3e} at {} K", worst.0, worst.1))?;

    // Branch boundaries: the value at the boundary belongs to the left branch
    // (closed on the right), and the values just beside it approach the
    // one-sided limits of the neighbouring formulas.
    let step = 1e-6; // Kelvin
    let mut boundary_err = 0.0f64;
    for (k, left, right) in [
        (6600u32, oracle_warm as fn(&DBig) -> [DBig; 3], oracle_middle as fn(&DBig) -> [DBig; 3]),
        (8800, oracle_middle, oracle_cool),
    ] {
        let t = oracle_temp(&k.to_string());
        let at = kelvin_to_rgb(f64::from(k)).unwrap().to_array();
        let below = kelvin_to_rgb(f64::from(k) - step).unwrap().to_array();
        let above = kelvin_to_rgb(f64::from(k) + step).unwrap().to_array();
        let l = clip_f64(left(&t));
        let r = clip_f64(right(&t));
        for (name, got, want) in [("at", at, l), ("left limit", below, l), ("right limit", above, r)] {
            let e = max_abs_diff(got, want);
            boundary_err = boundary_err.max(e);
            ensure(e <= 1e-6, || format!("{k} K {name}: {got:?} vs {want:?}"))?;
        }
    }
    ensure(elapsed.as_secs_f64() < 1.0, || format!("grid took {elapsed:?}"))?;
    Ok(format!(
        "8001 points, max |err| {:.2e} at {} K, boundary max |err| {:.2e}, grid time {:.2?}",
        worst.0, worst.1, boundary_err, elapsed
    ))
}

fn ac2() -> Check {
    let rgb: Vec<(u32, [f64; 3])> =
        (2000..=10000u32).map(|k| (k, kelvin_to_rgb(f64::from(k)).unwrap().to_array())).collect();
    let mut violations = Vec::new();
    for w in rgb.windows(2) {
        let ((k0, a), (k1, b)) = (w[0], w[1]);
        if k1 <= 6600 {
            if a[0] != 255.0 || b[0] != 255.0 {
                violations.push(format!("R not 255 at {k1} K"));
            }
            if b[1] < a[1] || b[2] < a[2] {
                violations.push(format!("G/B decrease {k0}->{k1} K"));
            }
        }
        if k0 > 8800 {
            if a[2] != 255.0 || b[2] != 255.0 {
                violations.push(format!("B not 255 at {k1} K"));
            }
            if b[0] > a[0] || b[1] > a[1] {
                violations.push(format!("R/G increase {k0}->{k1} K"));
            }
        }
    }
    ensure(violations.is_empty(), || format!("{} violations, first: {}", violations.len(), violations[0]))?;
    Ok("0 violations on the 1 K grid".into())
}

// ---------------------------------------------------------------- AC3, AC4

fn ac3() -> Check {
    let base = noise_image(64, 48, 3);
    let model = SensorModel::default();
    let same = simulate_exposure(&base, 0.2, &model, ExposureMode::Deterministic).map_err(|e| e.to_string())?;
    let bit_exact = same.data().iter().zip(base.data()).all(|(a, b)| a.to_bits() == b.to_bits());
    ensure(bit_exact && same.to_rgb8() == base.to_rgb8(), || "shutter 0.2 changed the base image".into())?;

    // Unsaturated ramp: H <= 0.19 so m * H < 1 up to m = 5.
    let linear = SensorModel::default().with_gamma(1.0);
    let ramp = ImagePlane::from_fn(96, 64, Encoding::Gamma(1.0), |x, y| {
        let v = 0.01 + 0.18 * (x + y * 96) as f64 / (96.0 * 64.0);
        [v, 0.9 * v, 0.8 * v]
    })
    .unwrap();
    let mut worst = 1.0f64;
    for j in 0..20 {
        let set = sample_setting_set(SettingKind::Shutter, 5, derive_frame_seed(0xAC3, j)).unwrap();
        let frames: Vec<ImagePlane> = set
            .values()
            .iter()
            .map(|&s| simulate_exposure(&ramp, s, &linear, ExposureMode::Deterministic).unwrap())
            .collect();
        let series = measure_effect(&frames, SettingKind::Shutter, &MeasureOptions::default()).unwrap();
        let r = pearson(&series.values, set.values()).unwrap();
        worst = worst.min(r);
    }
    ensure(worst >= 0.999, || format!("min Pearson r {worst:.6} < 0.999"))?;
    Ok(format!("identity bit-exact; min r over 20 sets = {worst:.9} (gamma 1)"))
}

/// Seed for the pixel draw and every Monte-Carlo stream. Each of the 100
/// pixels is its own 3 SE test, so a correct simulator still trips one of
/// them about a quarter of the time; the seed is the crate-wide default and
/// is not tuned.
const AC4_SEED: u64 = 0;

/// 99.9% quantile of chi-square with 100 degrees of freedom.
const CHI2_100_999: f64 = 149.449;

fn ac4() -> Check {
    let model = SensorModel::default();
    let draws = 10_000u64;
    let mut rng = SplitMix64::new(AC4_SEED);
    // 100 pixels with m * H spread over (0.05, 0.95).
    let shutter = 0.5;
    let m = shutter / model.base_exposure;
    let targets: Vec<f64> = (0..100).map(|_| 0.05 + 0.9 * rng.next_f64()).collect();
    let base = ImagePlane::from_fn(100, 1, Encoding::Gamma(model.gamma), |x, _| {
        let h = targets[x] / m;
        [h.powf(1.0 / model.gamma); 3]
    })
    .unwrap();
    let det = simulate_exposure(&base, shutter, &model, ExposureMode::Deterministic).unwrap();
    let expected: Vec<f64> = (0..100).map(|x| det.pixel(x, 0)[0].powf(model.gamma)).collect();

    let mut sum = vec![0.0f64; 100];
    let mut sum_sq = vec![0.0f64; 100];
    for d in 0..draws {
        let f = simulate_exposure(&base, shutter, &model, ExposureMode::Stochastic { seed: derive_frame_seed(AC4_SEED, d) })
            .unwrap();
        for x in 0..100 {
            let v = f.pixel(x, 0)[0].powf(model.gamma);
            sum[x] += v;
            sum_sq[x] += v * v;
        }
    }
    let n = draws as f64;
    let mut worst_z = 0.0f64;
    let mut chi2 = 0.0;
    let mut outside = 0;
    for x in 0..100 {
        let mean = sum[x] / n;
        let var = (sum_sq[x] - n * mean * mean) / (n - 1.0);
        let se = (var / n).sqrt();
        let z = (mean - expected[x]).abs() / se;
        worst_z = worst_z.max(z);
        chi2 += z * z;
        if z > 3.0 {
            outside += 1;
        }
    }
    ensure(outside == 0, || format!("{outside}/100 pixels beyond 3 SE (max z {worst_z:.2})"))?;
    // Jointly, the squared z-scores should look like chi-square(100).
    ensure(chi2 < CHI2_100_999, || format!("sum z^2 = {chi2:.1} over 100 pixels"))?;
    Ok(format!(
        "100 pixels x 1e4 draws, photon_scale {}, max z {worst_z:.2}, sum z^2 {chi2:.1}",
        model.photon_scale
    ))
}

// ---------------------------------------------------------------- AC5, AC6

fn ac5() -> Check {
    let spec = SensorSpec::default();
    let h = fov(&spec, 24.0, FovAxis::Horizontal).unwrap();
    ensure((h - 73.7398).abs() <= 1e-3, || format!("fov {h}"))?;
    let rho = crop_fraction(&spec, 48.0).unwrap();
    ensure(rho == 0.5, || format!("crop fraction {rho}"))?;

    let (lo, hi) = SettingKind::Focal.range();
    let mut rng = SplitMix64::new(0xAC5);
    for i in 0..1000 {
        let mut f1 = lo + (hi - lo) * rng.next_f64();
        let mut f2 = lo + (hi - lo) * rng.next_f64();
        if f1 > f2 {
            std::mem::swap(&mut f1, &mut f2);
        }
        if f1 == f2 {
            continue;
        }
        let w = 64 + (rng.next_f64() * 4000.0) as usize;
        let h = 64 + (rng.next_f64() * 3000.0) as usize;
        let a = crop_window(w, h, &spec, f1).unwrap();
        let b = crop_window(w, h, &spec, f2).unwrap();
        let nested = b.x >= a.x && b.y >= a.y && b.x + b.width <= a.x + a.width && b.y + b.height <= a.y + a.height;
        ensure(nested, || format!("pair {i}: {f1} mm {a:?} does not contain {f2} mm {b:?} in {w}x{h}"))?;
    }
    Ok(format!("fov {h:.4} deg, crop(48) = {rho}, 1000 nested pairs"))
}

fn ac6() -> Check {
    let base = dead_leaves(3000, 3000, 25_000, 0xAC6);
    let scene = Scene::new(base, None);
    let config = SimConfig::default();
    let focals = [24.0, 36.0, 48.0, 60.0, 70.0];
    let frames: Vec<ImagePlane> = focals
        .iter()
        .map(|&f| render_frame(&scene, CameraSetting::new(SettingKind::Focal, f).unwrap(), &config, 0).unwrap())
        .collect();
    drop(scene);
    let measured = measure_effect(&frames, SettingKind::Focal, &MeasureOptions::default()).map_err(|e| e.to_string())?;
    let truth: Vec<f64> = focals.iter().map(|f| f / 24.0).collect();
    let rel: Vec<f64> = measured.values.iter().zip(&truth).map(|(m, t)| (m - t).abs() / t).collect();
    let worst = rel.iter().copied().fold(0.0, f64::max);
    let r = trend_corrcoef(&measured, &EffectSeries::scalar(SettingKind::Focal, truth.clone())).unwrap();
    let shown: Vec<String> = measured.values.iter().map(|v| format!("{v:.4}")).collect();
    ensure(worst <= 0.05, || format!("scales [{}], max rel err {:.2}%", shown.join(", "), worst * 100.0))?;
    ensure(r >= 0.99, || format!("corr {r}"))?;
    Ok(format!("3000 px base, scales [{}], max rel err {:.2}%, corr {r:.6}", shown.join(", "), worst * 100.0))
}

// ---------------------------------------------------------------- AC7

fn ac7() -> Check {
    let (w, h) = (128, 96);
    let img = noise_image(w, h, 0xAC7);
    let disp = disc_over_ramp(w, h);
    let focus = pick_focus_disparity(&disp, DEFAULT_FOCUS_PERCENTILE).unwrap();

    let mut worst_fg = 0.0f64;
    for k in [1.0, 10.0, 20.0, 30.0] {
        let out = render_bokeh(&img, &disp, &BokehParams::new(k, focus).unwrap()).unwrap();
        for (i, d) in disp.data().iter().enumerate() {
            if (d - focus).abs() < 0.02 {
                for c in 0..3 {
                    worst_fg = worst_fg.max((out.data()[3 * i + c] - img.data()[3 * i + c]).abs());
                }
            }
        }
    }
    ensure(worst_fg < 1.0 / 255.0, || format!("foreground deviation {worst_fg}"))?;

    let mask = camsim::bokeh::background_mask(&disp, focus, camsim::bokeh::BACKGROUND_THRESHOLD);
    let ks = [1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0];
    let lap: Vec<f64> = ks
        .iter()
        .map(|&k| {
            let out = render_bokeh(&img, &disp, &BokehParams::new(k, focus).unwrap()).unwrap();
            mean_abs_laplacian(&out.luma(), Some(&mask)).unwrap()
        })
        .collect();
    ensure(lap.windows(2).all(|p| p[1] < p[0]), || format!("background Laplacian not decreasing: {lap:?}"))?;

    let flat = ImagePlane::filled(w, h, [0.3, 0.55, 0.8], Encoding::Gamma(2.2)).unwrap();
    for k in [1.0, 30.0] {
        let out = render_bokeh(&flat, &disp, &BokehParams::new(k, focus).unwrap()).unwrap();
        ensure(out.data().iter().zip(flat.data()).all(|(a, b)| a.to_bits() == b.to_bits()), || {
            format!("constant image changed at K = {k}")
        })?;
    }
    Ok(format!(
        "focus d = {focus:.3}, max fg deviation {worst_fg:.2e}, Laplacian {:.4} -> {:.4}, constant image exact",
        lap[0],
        lap[lap.len() - 1]
    ))
}

// ---------------------------------------------------------------- AC8

fn ac8() -> Check {
    let config = SimConfig::default();
    let opts = EvalOptions {
        kind: None,
        values: None,
        metric: &Dssim,
        reduction: ColorTempReduction::BlueMinusRed,
        quality: None,
    };
    let mut lines = Vec::new();
    for kind in SettingKind::ALL {
        let (w, h) = if kind == SettingKind::Focal { (768, 768) } else { (96, 72) };
        let image = dead_leaves(w, h, if kind == SettingKind::Focal { 3000 } else { 300 }, 0xAC8);
        let disparity = (kind == SettingKind::Bokeh).then(|| disc_over_ramp(w, h));
        let scene = Scene::new(image, disparity);
        let set = sample_setting_set(kind, 5, derive_frame_seed(0xAC8, kind as u64)).unwrap();
        let frames: Vec<ImagePlane> = set
            .settings()
            .enumerate()
            .map(|(i, s)| render_frame(&scene, s, &config, derive_frame_seed(set.seed(), i as u64)).unwrap())
            .collect();
        let mask = match &scene.disparity {
            Some(d) => {
                let focus = bokeh_params(d, set.values()[0], &config).unwrap().focus_disparity;
                Some(camsim::bokeh::background_mask(d, focus, camsim::bokeh::BACKGROUND_THRESHOLD))
            }
            None => None,
        };
        let report = evaluate_frames(kind, &frames, &frames, Some(set.values().to_vec()), mask, &opts)
            .map_err(|e| format!("{}: {e}", kind.name()))?;
        let shown = format!("{:.4}", report.accuracy_corrcoef);
        ensure(shown == "1.0000", || format!("{}: CorrCoef {}", kind.name(), report.accuracy_corrcoef))?;
        ensure(report.consistency_gap == 0.0, || format!("{}: gap {}", kind.name(), report.consistency_gap))?;
        lines.push(format!("{} {shown}", kind.name()));
    }
    Ok(format!("CorrCoef {}, consistency gap 0.0", lines.join(", ")))
}

// ---------------------------------------------------------------- AC9

fn ac9() -> Check {
    let n = 100_000;
    let bins = 100;
    let mut stats = Vec::new();
    for kind in SettingKind::ALL {
        let (lo, hi) = kind.range();
        let set = sample_setting_set(kind, n, derive_frame_seed(0xAC9, kind as u64)).unwrap();
        let mut u: Vec<f64> = set.values().iter().map(|v| (v - lo) / (hi - lo)).collect();
        u.sort_by(f64::total_cmp);
        let nf = n as f64;
        let ks = u
            .iter()
            .enumerate()
            .map(|(i, &x)| ((i + 1) as f64 / nf - x).max(x - i as f64 / nf))
            .fold(0.0, f64::max);
        ensure(ks < 0.01, || format!("{}: KS {ks}", kind.name()))?;

        let grid: Vec<f64> = (0..bins).map(|k| lo + k as f64 * (hi - lo) / (bins - 1) as f64).collect();
        let snapped = discretize_setting_set(&set, bins).unwrap();
        for (&v, &s) in set.values().iter().zip(snapped.values()) {
            let on_grid = (0..bins).any(|k| s == grid_point(kind, bins, k));
            let nearest = grid
                .iter()
                .map(|g| (g - v).abs())
                .fold(f64::INFINITY, f64::min);
            ensure(on_grid && ((s - v).abs() - nearest).abs() <= 1e-9 * (hi - lo), || {
                format!("{}: {v} snapped to {s}", kind.name())
            })?;
        }
        for (k, g) in grid.iter().enumerate() {
            let gp = grid_point(kind, bins, k);
            ensure((gp - g).abs() <= 1e-12 * hi, || format!("{}: grid point {k} = {gp}, expected {g}", kind.name()))?;
        }
        stats.push(format!("{} {ks:.4}", kind.name()));
    }
    Ok(format!("n = 1e5, KS: {}; 100-bin snap exact", stats.join(", ")))
}

// ---------------------------------------------------------------- AC10

fn write_bases(dir: &Path) {
    std::fs::create_dir_all(dir).unwrap();
    for (i, name) in ["alpha", "beta", "gamma"].iter().enumerate() {
        let (w, h) = (96, 64);
        let img = dead_leaves(w, h, 200, 100 + i as u64);
        // Pull luma toward mid-gray so the exposure gate passes.
        let img = ImagePlane::from_fn(w, h, Encoding::Gamma(2.2), |x, y| img.pixel(x, y).map(|c| 0.3 + 0.4 * c)).unwrap();
        img.write_png(dir.join(format!("{name}.png"))).unwrap();
        disc_over_ramp(w, h).plane().write_png(dir.join(format!("{name}.disparity.png"))).unwrap();
        std::fs::write(dir.join(format!("{name}.txt")), format!("a {name} scene")).unwrap();
    }
}

fn tree(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn ac10() -> Check {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("bases");
    write_bases(&input);
    let bases = camsim::dataset::list_base_images(&input).unwrap();
    let captions = CaptionChain::new(vec![Box::new(SidecarCaptions)]);
    let mut config = SimConfig::default();
    config.quality_gates.focal_min_short_side = 32;

    let mut files = 0;
    for kind in SettingKind::ALL {
        let opts = BuildOptions { kind, frames: 5, count: 20, seed: 0xAC10 };
        let a = tmp.path().join(format!("{}-a", kind.name()));
        let b = tmp.path().join(format!("{}-b", kind.name()));
        let ma = build_dataset(&bases, &opts, &config, &captions, &a).map_err(|e| e.to_string())?;
        build_dataset(&bases, &opts, &config, &captions, &b).map_err(|e| e.to_string())?;
        ensure(ma.sets.len() == 20 && ma.skipped.is_empty(), || {
            format!("{}: {} sets, {} skipped", kind.name(), ma.sets.len(), ma.skipped.len())
        })?;
        let (ta, tb) = (tree(&a), tree(&b));
        ensure(ta == tb, || format!("{}: runs differ", kind.name()))?;
        files += ta.len();

        let text = std::fs::read_to_string(a.join(MANIFEST_FILE)).unwrap();
        let parsed = Manifest::from_json(&text).map_err(|e| e.to_string())?;
        ensure(parsed == ma, || format!("{}: read manifest differs from built one", kind.name()))?;
        let again = tmp.path().join("again.json");
        write_manifest(&again, &read_manifest(a.join(MANIFEST_FILE)).unwrap()).unwrap();
        ensure(std::fs::read(&again).unwrap() == text.as_bytes(), || {
            format!("{}: read then write changed the manifest", kind.name())
        })?;
    }
    Ok(format!("4 kinds x 20 sets x 5 frames, {files} files byte-identical, manifest round trip exact"))
}

// ---------------------------------------------------------------- AC11

fn ac11() -> Check {
    let spec = SensorSpec::default();
    for kind in SettingKind::ALL {
        let values = sample_setting_set(kind, 6, 11).unwrap().values().to_vec();
        let a = coarse_embedding(&SettingSet::new(kind, values.clone(), 1).unwrap(), 3, 16, 24, &spec).unwrap();
        let b = coarse_embedding(&SettingSet::new(kind, values, 2).unwrap(), 3, 16, 24, &spec).unwrap();
        ensure(a.to_bytes() == b.to_bytes(), || format!("{}: embedding depends on more than the values", kind.name()))?;
        if kind != SettingKind::Focal {
            for f in 0..a.dims().0 {
                let frame = a.frame(f);
                let plane = 16 * 24;
                let flat = frame.chunks(plane).all(|ch| ch.iter().all(|&v| v.to_bits() == ch[0].to_bits()));
                ensure(flat, || format!("{}: frame {f} has spatial structure", kind.name()))?;
            }
        }
    }

    let provider = HashEmbeddingProvider::new(64);
    let mut worst = 0.0f64;
    for kind in SettingKind::ALL {
        let set = sample_setting_set(kind, 7, 23).unwrap();
        let diffs = setting_diff_features(&set, &provider).unwrap();
        let first = provider.embed(&format_label(kind, set.values()[0])).unwrap();
        let last = provider.embed(&format_label(kind, set.values()[6])).unwrap();
        for c in 0..64 {
            let sum: f64 = diffs.iter().map(|d| d[c]).sum();
            worst = worst.max((sum - (last[c] - first[c])).abs());
        }
        ensure(diffs[6].iter().all(|&v| v == 0.0), || "last difference is not zero".into())?;
    }
    ensure(worst <= 1e-6, || format!("telescoping error {worst}"))?;

    let mut rng = SplitMix64::new(0xAC11);
    let mut data: Vec<f32> = (0..2 * 3 * 5 * 7).map(|_| (rng.next_f64() * 2e6 - 1e6) as f32).collect();
    data[0] = -0.0;
    data[1] = f32::MIN_POSITIVE / 4.0;
    data[2] = f32::MAX;
    data[3] = f32::MIN;
    let t = EmbeddingTensor::new(2, 3, 5, 7, data).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("t.cemb");
    t.write(&path).unwrap();
    let back = EmbeddingTensor::read(&path).unwrap();
    let exact = back.dims() == t.dims() && back.data().iter().zip(t.data()).all(|(a, b)| a.to_bits() == b.to_bits());
    ensure(exact && std::fs::read(&path).unwrap() == t.to_bytes(), || "tensor file round trip is not exact".into())?;
    Ok(format!("embedding ignores all but values; telescoping max err {worst:.2e}; tensor file bit-exact"))
}

// ---------------------------------------------------------------- harness

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("kelvin to rgb matches high-precision oracle", ac1),
        ("kelvin to rgb branch monotonicity", ac2),
        ("exposure identity and linearity", ac3),
        ("stochastic exposure converges to deterministic", ac4),
        ("field of view and crop nesting", ac5),
        ("focal scale recovery", ac6),
        ("bokeh invariants", ac7),
        ("reference self-evaluation", ac8),
        ("sampling uniformity and discretization", ac9),
        ("dataset determinism", ac10),
        ("embedding contracts", ac11),
    ];
    let mut failed = Vec::new();
    let mut stderr = std::io::stderr();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        writeln!(stderr, "AC{:<2} {tag}  {name} ({secs:.1}s): {detail}", i + 1).unwrap();
        if outcome.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

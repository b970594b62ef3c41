//! SVG line charts of generated vs reference effect trends.

use std::fmt::Write as _;

use super::EvalReport;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;

/// Each series is min-max normalised (correlation ignores scale) and plotted
/// against the setting value, or the frame index when values are unknown.
/// Points are joined in increasing x order.
pub fn trend_svg(report: &EvalReport) -> String {
    let n = report.generated.values.len();
    let (xs, x_label): (Vec<f64>, String) = match &report.values {
        Some(v) if v.len() == n => (v.clone(), format!("{} value", report.kind)),
        _ => ((0..n).map(|i| i as f64).collect(), "frame index".into()),
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));

    let (xmin, xmax) = bounds(&xs);
    let sx = |x: f64| MARGIN + (WIDTH - 2.0 * MARGIN) * unit(x, xmin, xmax);
    let sy = |y: f64| HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * y;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{} trend (r = {:.4})</text>"#,
        WIDTH / 2.0,
        report.kind,
        report.accuracy_corrcoef
    );
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, MARGIN);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">normalised effect</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (x, anchor) in [(xmin, x0), (xmax, x1)] {
        let _ = writeln!(svg, r#"<text x="{anchor}" y="{}" text-anchor="middle">{}</text>"#, y0 + 16.0, fmt_tick(x));
    }

    for (series, colour, name, dy) in [
        (&report.reference.values, "#1f77b4", "reference", 0.0),
        (&report.generated.values, "#d62728", "generated", 16.0),
    ] {
        let (lo, hi) = bounds(series);
        let points: Vec<String> = order
            .iter()
            .map(|&i| format!("{:.2},{:.2}", sx(xs[i]), sy(unit(series[i], lo, hi))))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#,
            points.join(" ")
        );
        for p in &points {
            let (cx, cy) = p.split_once(',').unwrap_or(("0", "0"));
            let _ = writeln!(svg, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{colour}"/>"#);
        }
        let ly = MARGIN + 8.0 + dy;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/><text x="{}" y="{}">{name}</text>"#,
            x1 - 110.0,
            x1 - 90.0,
            x1 - 84.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Position of `v` in `[lo, hi]`; the midpoint for a degenerate range.
fn unit(v: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        (v - lo) / (hi - lo)
    } else {
        0.5
    }
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 100.0 || v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{EffectSeries, REPORT_SCHEMA_VERSION};
    use crate::setting::SettingKind;

    fn report(values: Option<Vec<f64>>) -> EvalReport {
        EvalReport {
            schema_version: REPORT_SCHEMA_VERSION,
            kind: SettingKind::Shutter,
            frame_count: 3,
            values,
            accuracy_corrcoef: 0.5,
            consistency: 0.1,
            reference_consistency: 0.1,
            consistency_gap: 0.0,
            quality: None,
            quality_plugin: None,
            perceptual_metric: "dssim".into(),
            colortemp_reduction: None,
            scale_method: None,
            generated: EffectSeries::scalar(SettingKind::Shutter, vec![0.3, 0.1, 0.2]),
            reference: EffectSeries::scalar(SettingKind::Shutter, vec![0.5, 0.5, 0.5]),
        }
    }

    #[test]
    fn svg_has_both_series() {
        let svg = trend_svg(&report(Some(vec![0.9, 0.1, 0.5])));
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 6);
        assert!(svg.contains("shutter value"));
        // Points sorted by value: x = 0.1 first, with generated value 0.1 -> bottom.
        let generated = svg.lines().filter(|l| l.contains("<polyline")).nth(1).unwrap();
        assert!(generated.contains(&format!("points=\"{:.2},{:.2}", MARGIN, HEIGHT - MARGIN)));
    }

    #[test]
    fn falls_back_to_frame_index() {
        let svg = trend_svg(&report(None));
        assert!(svg.contains("frame index"));
    }
}

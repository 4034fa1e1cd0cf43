//! Per-metric curve CSV files and minimal SVG 1.1 line charts of metric
//! value against threshold.

use std::fmt::Write as _;

use crate::sweep::{CurvePoint, MetricKind};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

/// `tau,coverage,value` rows; undefined values are left empty.
pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("tau,coverage,value\n");
    for p in points {
        let value = p.value.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{}", p.tau, p.coverage, value);
    }
    out
}

fn y_range(metric: MetricKind) -> (f64, f64) {
    match metric {
        MetricKind::Cwsa => (-1.0, 1.0),
        MetricKind::CwsaPlus | MetricKind::SelectiveAccuracy => (0.0, 1.0),
    }
}

/// Line chart of one metric over the threshold grid. Undefined points
/// break the line into separate segments.
pub fn metric_chart(metric: MetricKind, source_id: &str, points: &[CurvePoint]) -> String {
    let (mut x0, mut x1) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.tau), hi.max(p.tau))
        });
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 - x0 < 1e-9 {
        x0 -= 0.01;
        x1 += 0.01;
    }
    let (y0, y1) = y_range(metric);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + (y1 - y.clamp(y0, y1)) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{:.2}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{} ({})</text>"#,
        WIDTH / 2.0,
        metric,
        escape(source_id)
    );

    // horizontal grid lines with value labels
    let y_ticks = if y0 < 0.0 { 8 } else { 5 };
    for i in 0..=y_ticks {
        let v = y0 + (y1 - y0) * i as f64 / y_ticks as f64;
        let y = sy(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd" stroke-width="1"/>
<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{v:.2}</text>"##,
            WIDTH - RIGHT,
            LEFT - 6.0,
            y + 3.0
        );
    }

    // one tick per grid threshold, labelled sparsely
    let label_every = (points.len() / 10).max(1);
    for (i, p) in points.iter().enumerate() {
        let x = sx(p.tau);
        let base = TOP + plot_h;
        let len = if i % label_every == 0 { 6.0 } else { 3.0 };
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{base:.2}" x2="{x:.2}" y2="{:.2}" stroke="black" stroke-width="1"/>"#,
            base + len
        );
        if i % label_every == 0 {
            let _ = writeln!(
                svg,
                r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">{:.2}</text>"#,
                base + 18.0,
                p.tau
            );
        }
    }

    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.2}" stroke="black" stroke-width="1"/>
<line x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1"/>
<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">threshold</text>"#,
        TOP + plot_h,
        TOP + plot_h,
        WIDTH - RIGHT,
        TOP + plot_h,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );

    for segment in points
        .split(|p| p.value.is_none())
        .filter(|s| !s.is_empty())
    {
        let coords: Vec<String> = segment
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.tau), sy(p.value.unwrap_or(0.0))))
            .collect();
        let _ = writeln!(
            svg,
            r##"<polyline fill="none" stroke="#1f77b4" stroke-width="2" points="{}"/>"##,
            coords.join(" ")
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts() -> Vec<CurvePoint> {
        vec![
            CurvePoint {
                tau: 0.5,
                coverage: 1.0,
                value: Some(0.2),
            },
            CurvePoint {
                tau: 0.6,
                coverage: 0.5,
                value: Some(0.4),
            },
            CurvePoint {
                tau: 0.7,
                coverage: 0.0,
                value: None,
            },
        ]
    }

    #[test]
    fn csv_leaves_undefined_blank() {
        let text = curve_csv(&pts());
        assert_eq!(text, "tau,coverage,value\n0.5,1,0.2\n0.6,0.5,0.4\n0.7,0,\n");
    }

    #[test]
    fn chart_is_svg_with_one_segment() {
        let svg = metric_chart(MetricKind::SelectiveAccuracy, "a<b", &pts());
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("a&lt;b"));
    }

    #[test]
    fn chart_handles_single_point() {
        let svg = metric_chart(MetricKind::Cwsa, "x", &pts()[..1]);
        assert!(!svg.contains("NaN"));
    }
}

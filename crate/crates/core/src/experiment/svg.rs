//! Self-contained SVG line plot of an experiment summary.
//!
//! No plotting dependency: axes, ticks, polylines, point markers, and a
//! legend are emitted directly, with coordinates formatted at fixed
//! precision so output is byte-stable for identical summaries.

use std::fmt::Write as _;

use crate::experiment::ScalingSummary;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 32.0;
const MARGIN_BOTTOM: f64 = 56.0;

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    dashed: bool,
    points: Vec<(f64, f64)>,
}

/// Mean, q95, and bound against `sqrt(sum_k n_k)`.
pub fn render_scaling_plot(summary: &ScalingSummary) -> String {
    let mut series = vec![
        Series { label: "mean norm", color: "#1f77b4", dashed: false, points: Vec::new() },
        Series { label: "q95 norm", color: "#ff7f0e", dashed: false, points: Vec::new() },
        Series { label: "bound", color: "#2ca02c", dashed: true, points: Vec::new() },
    ];
    for agg in &summary.per_shape {
        let x = agg.sqrt_sum_dims;
        if let Some(mean) = agg.mean {
            series[0].points.push((x, mean));
        }
        if let Some(q95) = agg.q95 {
            series[1].points.push((x, q95));
        }
        if let Some(bound) = agg.bound {
            series[2].points.push((x, bound));
        }
    }

    let xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    let ys: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.1)).collect();
    let (x_min, x_max) = padded_range(&xs, 1.0);
    let (_, y_top) = padded_range(&ys, 1.0);
    let y_min = 0.0;
    let y_max = if y_top <= 0.0 { 1.0 } else { y_top };

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_x = |v: f64| MARGIN_LEFT + (v - x_min) / (x_max - x_min) * plot_w;
    let to_y = |v: f64| MARGIN_TOP + plot_h - (v - y_min) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // axes
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    let _ = writeln!(
        svg,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1"/>"#,
        x0,
        y0,
        MARGIN_LEFT + plot_w,
        y0
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1"/>"#,
        x0, MARGIN_TOP, x0, y0
    );

    // ticks
    for i in 0..=4 {
        let fx = x_min + (x_max - x_min) * i as f64 / 4.0;
        let px = to_x(fx);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black" stroke-width="1"/>"#,
            y0,
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{:.2}" font-family="monospace" font-size="12" text-anchor="middle">{fx:.2}</text>"#,
            y0 + 20.0
        );
        let fy = y_min + (y_max - y_min) * i as f64 / 4.0;
        let py = to_y(fy);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black" stroke-width="1"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12" text-anchor="end">{fy:.2}</text>"#,
            x0 - 9.0,
            py + 4.0
        );
    }

    // axis labels
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="13" text-anchor="middle">sqrt(sum of dims)</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" font-family="monospace" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.2})">spectral norm</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    // series
    for s in &series {
        if s.points.is_empty() {
            continue;
        }
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        if s.points.len() > 1 {
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", to_x(x), to_y(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"{dash}/>"#,
                path.join(" "),
                s.color
            );
        }
        for &(x, y) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
                to_x(x),
                to_y(y),
                s.color
            );
        }
    }

    // legend
    let legend_x = MARGIN_LEFT + 12.0;
    let mut legend_y = MARGIN_TOP + 12.0;
    let _ = writeln!(
        svg,
        r#"<rect x="{:.2}" y="{:.2}" width="130" height="62" fill="white" stroke="black" stroke-width="0.5"/>"#,
        legend_x - 6.0,
        legend_y - 10.0
    );
    for s in &series {
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<line x1="{legend_x:.2}" y1="{legend_y:.2}" x2="{:.2}" y2="{legend_y:.2}" stroke="{}" stroke-width="2"{dash}/>"#,
            legend_x + 24.0,
            s.color
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12">{}</text>"#,
            legend_x + 30.0,
            legend_y + 4.0,
            s.label
        );
        legend_y += 18.0;
    }

    svg.push_str("</svg>\n");
    svg
}

fn padded_range(values: &[f64], fallback_pad: f64) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 1.0);
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        (min - fallback_pad, max + fallback_pad)
    } else {
        let pad = (max - min) * 0.05;
        (min - pad, max + pad)
    }
}

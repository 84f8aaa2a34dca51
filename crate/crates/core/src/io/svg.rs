//! Minimal static SVG renderings: a line chart with an optional shaded band
//! (back-test layout) and a heatmap grid. No dependencies, deterministic
//! output.

use crate::backtest::BandPoint;
use crate::ranking::HeatmapMatrix;

const W: f64 = 900.0;
const H: f64 = 420.0;
const MARGIN: f64 = 45.0;

fn scale(points: &[(f64, f64)]) -> impl Fn(f64, f64) -> (f64, f64) {
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in points {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    move |x: f64, y: f64| {
        (
            MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN),
            H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN),
        )
    }
}

fn polyline(points: &[(f64, f64)], to: &impl Fn(f64, f64) -> (f64, f64), color: &str, dash: &str) -> String {
    if points.is_empty() {
        return String::new();
    }
    let pts: Vec<String> = points
        .iter()
        .map(|(x, y)| {
            let (px, py) = to(*x, *y);
            format!("{px:.2},{py:.2}")
        })
        .collect();
    format!(
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{} points=\"{}\"/>\n",
        if dash.is_empty() {
            String::new()
        } else {
            format!(" stroke-dasharray=\"{dash}\"")
        },
        pts.join(" ")
    )
}

/// Back-test chart: actuals, moving average, +/-2 SE band, and forecasts.
pub fn backtest_chart(
    title: &str,
    actual: &[(f64, f64)],
    center: &[(f64, f64)],
    band: &[(f64, BandPoint)],
    model: &[(f64, f64)],
    benchmark: &[(f64, f64)],
) -> String {
    let mut all: Vec<(f64, f64)> = Vec::new();
    all.extend_from_slice(actual);
    all.extend_from_slice(center);
    all.extend_from_slice(model);
    all.extend_from_slice(benchmark);
    for (x, b) in band {
        all.push((*x, b.lower));
        all.push((*x, b.upper));
    }
    let to = scale(&all);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{MARGIN}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>\n"
    );
    if !band.is_empty() {
        let mut path: Vec<String> = band
            .iter()
            .map(|(x, b)| {
                let (px, py) = to(*x, b.upper);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        path.extend(band.iter().rev().map(|(x, b)| {
            let (px, py) = to(*x, b.lower);
            format!("{px:.2},{py:.2}")
        }));
        svg.push_str(&format!(
            "<polygon fill=\"#f8c8d4\" fill-opacity=\"0.6\" stroke=\"none\" points=\"{}\"/>\n",
            path.join(" ")
        ));
    }
    svg.push_str(&polyline(actual, &to, "#222222", ""));
    svg.push_str(&polyline(center, &to, "#3355cc", "4 3"));
    svg.push_str(&polyline(model, &to, "#cc2222", "6 2"));
    svg.push_str(&polyline(benchmark, &to, "#888833", "2 2"));
    svg.push_str(
        "<g font-family=\"sans-serif\" font-size=\"11\">\
         <text x=\"60\" y=\"36\" fill=\"#222222\">actual</text>\
         <text x=\"120\" y=\"36\" fill=\"#3355cc\">moving average</text>\
         <text x=\"240\" y=\"36\" fill=\"#cc2222\">model</text>\
         <text x=\"300\" y=\"36\" fill=\"#888833\">benchmark</text></g>\n",
    );
    svg.push_str("</svg>\n");
    svg
}

fn heat_color(score: f64, included: bool) -> String {
    if !included {
        return "#eeeeee".to_string();
    }
    // White-to-red ramp over [0, 1].
    let s = score.clamp(0.0, 1.0);
    let g = (235.0 - 180.0 * s) as u8;
    let b = (235.0 - 200.0 * s) as u8;
    format!("#{:02x}{:02x}{:02x}", 245u8, g, b)
}

/// Heatmap grid: rows are weeks (top = earliest), columns the ordered
/// variables.
pub fn heatmap_chart(title: &str, matrix: &HeatmapMatrix) -> String {
    let cols = matrix.columns.len().max(1);
    let rows = matrix.weeks.len().max(1);
    let cell_w = ((W - 2.0 * MARGIN) / cols as f64).min(24.0);
    let cell_h = ((H - 2.0 * MARGIN) / rows as f64).min(14.0);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{MARGIN}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>\n"
    );
    for (r, week) in matrix.weeks.iter().enumerate() {
        if r % 8 == 0 {
            svg.push_str(&format!(
                "<text x=\"2\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"8\">{week}</text>\n",
                MARGIN + r as f64 * cell_h + cell_h
            ));
        }
        for c in 0..matrix.columns.len() {
            let color = heat_color(matrix.scores[r][c], matrix.included[r][c]);
            svg.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{color}\" stroke=\"#ffffff\" stroke-width=\"0.4\"/>\n",
                MARGIN + c as f64 * cell_w,
                MARGIN + r as f64 * cell_h,
                cell_w,
                cell_h
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

//! CSV columns to a minimal SVG line plot. Reads only what is in the file.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;

use crate::config::config_error;

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub fn read_series(path: &Path, x: &str, group: &[String], y: &str) -> Result<Vec<Series>> {
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            config_error(format!("column \"{name}\" not in {} ({})", path.display(), headers.iter().collect::<Vec<_>>().join(",")))
        })
    };
    let (xi, yi) = (col(x)?, col(y)?);
    let gi: Vec<usize> = group.iter().map(|g| col(g)).collect::<Result<_>>()?;
    let mut series: Vec<Series> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let (Ok(xv), Ok(yv)) = (record[xi].parse::<f64>(), record[yi].parse::<f64>()) else {
            continue;
        };
        let label = gi.iter().zip(group).map(|(&i, g)| format!("{g}={}", &record[i])).collect::<Vec<_>>().join(" ");
        match series.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push((xv, yv)),
            None => series.push(Series { label, points: vec![(xv, yv)] }),
        }
    }
    Ok(series)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    (0..=4).map(|i| lo + (hi - lo) * i as f64 / 4.0).collect()
}

pub fn render(series: &[Series], x: &str, y: &str, log_y: bool) -> Result<String> {
    let ty = |v: f64| if log_y { v.log10() } else { v };
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|&(_, v)| !log_y || v > 0.0)
        .map(|(a, b)| (a, ty(b)))
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .collect();
    if pts.is_empty() {
        return Err(config_error("nothing to plot: no rows with numeric x and y"));
    }
    let (mut x0, mut x1, mut y0, mut y1) = pts.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(px, py)| (a.min(px), b.max(px), c.min(py), d.max(py)),
    );
    if x1 == x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 == y0 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |v: f64| MARGIN + (v - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |v: f64| HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
    )?;
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    writeln!(svg, r#"<path d="M{left},{top} V{bottom} H{right}" stroke="black" fill="none"/>"#)?;
    for t in ticks(x0, x1) {
        let px = sx(t);
        writeln!(svg, r#"<line x1="{px:.1}" y1="{bottom}" x2="{px:.1}" y2="{:.1}" stroke="black"/>"#, bottom + 4.0)?;
        writeln!(svg, r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, bottom + 16.0, fmt_tick(t))?;
    }
    for t in ticks(y0, y1) {
        let py = sy(t);
        let label = if log_y { format!("1e{}", fmt_tick(t)) } else { fmt_tick(t) };
        writeln!(svg, r#"<line x1="{:.1}" y1="{py:.1}" x2="{left}" y2="{py:.1}" stroke="black"/>"#, left - 4.0)?;
        writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{label}</text>"#, left - 6.0, py + 4.0)?;
    }
    writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 20.0, escape(x))?;
    let y_label = if log_y { format!("{y} (log10)") } else { y.to_string() };
    writeln!(
        svg,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(&y_label)
    )?;
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut points: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter(|&&(_, v)| !log_y || v > 0.0)
            .map(|&(a, b)| (a, ty(b)))
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = points.iter().map(|&(a, b)| format!("{:.1},{:.1}", sx(a), sy(b))).collect();
        writeln!(svg, r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="1.5"/>"#, path.join(" "))?;
        for &(a, b) in &points {
            writeln!(svg, r#"<circle cx="{:.1}" cy="{:.1}" r="2.5" fill="{color}"/>"#, sx(a), sy(b))?;
        }
        if !s.label.is_empty() {
            let ly = top + 14.0 * i as f64;
            writeln!(svg, r#"<text x="{:.1}" y="{ly:.1}" fill="{color}">{}</text>"#, right - 150.0, escape(&s.label))?;
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

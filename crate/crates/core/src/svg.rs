//! Minimal static SVG figures: spike raster with ASDR trace, and fitness
//! curves per generation.

use std::fmt::Write;

const WIDTH: f64 = 900.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn header(out: &mut String, height: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{height}" fill="white"/>"#);
}

fn polyline(out: &mut String, points: &[(f64, f64)], color: &str, class: &str) {
    if points.is_empty() {
        return;
    }
    let pts = points
        .iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(
        out,
        r#"<polyline class="{class}" fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>"#
    );
}

fn frame(out: &mut String, top: f64, height: f64, label: &str) {
    let w = WIDTH - 2.0 * MARGIN;
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{top}" width="{w}" height="{height}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" transform="rotate(-90 {} {})" text-anchor="middle">{label}</text>"#,
        MARGIN - 30.0,
        top + height / 2.0,
        MARGIN - 30.0,
        top + height / 2.0
    );
}

/// Raster of spikes (one `class="spike"` mark each) above the per-second
/// array-wide spike count.
pub fn raster_figure(spikes: &[crate::metrics::Spike], channels: usize, window_s: f64, asdr: &[u64]) -> String {
    let raster_h = 360.0;
    let asdr_top = MARGIN + raster_h + 30.0;
    let asdr_h = 140.0;
    let height = asdr_top + asdr_h + 40.0;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let channels = channels.max(1) as f64;
    let window_s = if window_s > 0.0 { window_s } else { 1.0 };
    let x_of = |t: f64| MARGIN + t / window_s * plot_w;
    let row_h = raster_h / channels;

    let mut out = String::new();
    header(&mut out, height);
    frame(&mut out, MARGIN, raster_h, "channel");
    out.push_str("<g fill=\"black\">\n");
    for s in spikes {
        let _ = writeln!(
            out,
            r#"<rect class="spike" x="{:.2}" y="{:.2}" width="1" height="{:.2}"/>"#,
            x_of(s.time_s),
            MARGIN + s.channel as f64 * row_h,
            row_h.max(1.0)
        );
    }
    out.push_str("</g>\n");

    frame(&mut out, asdr_top, asdr_h, "spikes/s");
    let peak = asdr.iter().copied().max().unwrap_or(0).max(1) as f64;
    let pts: Vec<(f64, f64)> = asdr
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            (
                x_of(i as f64 + 0.5),
                asdr_top + asdr_h - c as f64 / peak * asdr_h,
            )
        })
        .collect();
    polyline(&mut out, &pts, COLORS[0], "asdr");
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">time (s), 0 to {window_s}; peak {peak} spikes/s</text>"#,
        WIDTH / 2.0,
        height - 12.0
    );
    out.push_str("</svg>\n");
    out
}

/// Score curves per generation, optionally with a shaded mean +/- std band.
pub fn fitness_figure(series: &[(&str, &[f64])], band: Option<(&[f64], &[f64])>) -> String {
    let plot_h = 320.0;
    let height = plot_h + 2.0 * MARGIN + 20.0;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let finite = |v: &&f64| v.is_finite();
    let mut values: Vec<f64> = series.iter().flat_map(|(_, s)| s.iter().filter(finite).copied()).collect();
    if let Some((mean, std)) = band {
        for (m, s) in mean.iter().zip(std) {
            if m.is_finite() && s.is_finite() {
                values.push(m - s);
                values.push(m + s);
            }
        }
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min).min(0.0);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(1.0);
    let len = series
        .iter()
        .map(|(_, s)| s.len())
        .chain(band.map(|(m, _)| m.len()))
        .max()
        .unwrap_or(1)
        .max(2);
    let x_of = |i: usize| MARGIN + i as f64 / (len - 1) as f64 * plot_w;
    let y_of = |v: f64| MARGIN + plot_h - (v - lo) / (hi - lo) * plot_h;

    let mut out = String::new();
    header(&mut out, height);
    frame(&mut out, MARGIN, plot_h, "score");

    if let Some((mean, std)) = band {
        let upper: Vec<(f64, f64)> = mean
            .iter()
            .zip(std)
            .enumerate()
            .filter(|(_, (m, s))| m.is_finite() && s.is_finite())
            .map(|(i, (m, s))| (x_of(i), y_of(m + s)))
            .collect();
        let lower: Vec<(f64, f64)> = mean
            .iter()
            .zip(std)
            .enumerate()
            .filter(|(_, (m, s))| m.is_finite() && s.is_finite())
            .map(|(i, (m, s))| (x_of(i), y_of(m - s)))
            .rev()
            .collect();
        if !upper.is_empty() {
            let pts = upper
                .iter()
                .chain(&lower)
                .map(|(x, y)| format!("{x:.2},{y:.2}"))
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(
                out,
                r#"<polygon class="band" fill="{}" fill-opacity="0.25" points="{pts}"/>"#,
                COLORS[0]
            );
        }
        let pts: Vec<(f64, f64)> = mean
            .iter()
            .enumerate()
            .filter(|(_, m)| m.is_finite())
            .map(|(i, &m)| (x_of(i), y_of(m)))
            .collect();
        polyline(&mut out, &pts, COLORS[0], "mean");
    }

    for (k, (name, s)) in series.iter().enumerate() {
        let color = COLORS[(k + usize::from(band.is_some())) % COLORS.len()];
        let pts: Vec<(f64, f64)> = s
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(i, &v)| (x_of(i), y_of(v)))
            .collect();
        polyline(&mut out, &pts, color, "series");
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">{name}</text>"#,
            MARGIN + 10.0,
            MARGIN + 16.0 + 14.0 * k as f64
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">generation</text>"#,
        WIDTH / 2.0,
        height - 12.0
    );
    out.push_str("</svg>\n");
    out
}

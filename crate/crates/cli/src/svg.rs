//! Static SVG figures.
//!
//! Data is drawn inside a single `<g class="data">` whose transform maps data
//! coordinates to the canvas, so every path carries the plotted numbers
//! verbatim. Markers are zero-length subpaths drawn with round caps.

use std::fmt::Write;

use boxtail_core::BoxPlotSummary;

use crate::error::{CliError, Result};
use crate::io::fmt_sig;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

pub struct Labels<'a> {
    pub title: &'a str,
    pub x: &'a str,
    pub y: &'a str,
}

#[derive(Debug, Clone, Copy)]
struct Bounds {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let span = hi - lo;
    let pad = if span > 0.0 { 0.05 * span } else { 0.5 * lo.abs().max(1.0) };
    (lo - pad, hi + pad)
}

impl Bounds {
    fn around(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let (x0, x1) = padded(x0, x1);
        let (y0, y1) = padded(y0, y1);
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }

    fn transform(&self) -> String {
        let sx = (WIDTH - LEFT - RIGHT) / (self.x1 - self.x0);
        let sy = (HEIGHT - TOP - BOTTOM) / (self.y1 - self.y0);
        format!("translate({LEFT} {}) scale({sx} {}) translate({} {})", HEIGHT - BOTTOM, -sy, -self.x0, -self.y0)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polyline(points: &[(f64, f64)]) -> String {
    let mut d = String::new();
    for (i, (x, y)) in points.iter().enumerate() {
        let _ = write!(d, "{}{x} {y}", if i == 0 { "M" } else { " L" });
    }
    d
}

fn markers(points: &[(f64, f64)]) -> String {
    points.iter().map(|(x, y)| format!("M{x} {y} h0")).collect::<Vec<_>>().join(" ")
}

fn frame(out: &mut String, b: &Bounds, labels: &Labels, x_ticks: bool) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(labels.title));
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(labels.title));
    let (left, right, top, bottom) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(out, r#"<path class="axes" d="M{left} {top} V{bottom} H{right}" fill="none" stroke="black"/>"#);
    for k in 0..5 {
        let t = k as f64 / 4.0;
        let y = b.y0 + t * (b.y1 - b.y0);
        let py = b.py(y);
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 6.0, py + 4.0, fmt_sig(y, 4));
        if x_ticks {
            let x = b.x0 + t * (b.x1 - b.x0);
            let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, b.px(x), bottom + 16.0, fmt_sig(x, 4));
        }
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (left + right) / 2.0, HEIGHT - 10.0, escape(labels.x));
    let _ = writeln!(
        out,
        r#"<text transform="translate(16 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (top + bottom) / 2.0,
        escape(labels.y)
    );
}

/// Scatter of `points` joined by a line, with an optional second line (a fit).
pub fn line_chart(labels: &Labels, points: &[(f64, f64)], fit: Option<&[(f64, f64)]>) -> Result<String> {
    if points.is_empty() {
        return Err(CliError::Invalid("nothing to plot: the curve has no points".into()));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(CliError::Invalid("curve contains non-finite values".into()));
    }
    let b = Bounds::around(points.iter().copied().chain(fit.unwrap_or(&[]).iter().copied()));
    let mut out = String::new();
    frame(&mut out, &b, labels, true);
    let _ = writeln!(out, r#"<g class="data" transform="{}" fill="none" stroke-linejoin="round">"#, b.transform());
    let _ = writeln!(
        out,
        r##"<path class="line" d="{}" stroke="#1f4e79" stroke-width="1" vector-effect="non-scaling-stroke"/>"##,
        polyline(points)
    );
    if let Some(fit) = fit.filter(|f| !f.is_empty()) {
        let _ = writeln!(
            out,
            r##"<path class="fit" d="{}" stroke="#b22222" stroke-width="1.5" stroke-dasharray="6 4" vector-effect="non-scaling-stroke"/>"##,
            polyline(fit)
        );
    }
    let _ = writeln!(
        out,
        r##"<path class="markers" d="{}" stroke="#1f4e79" stroke-width="5" stroke-linecap="round" vector-effect="non-scaling-stroke"/>"##,
        markers(points)
    );
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

/// One box per group at x = 1, 2, ….
pub fn box_chart(labels: &Labels, groups: &[(String, BoxPlotSummary)]) -> Result<String> {
    if groups.is_empty() {
        return Err(CliError::Invalid("nothing to plot: no box-plot summaries".into()));
    }
    let extent = groups.iter().enumerate().flat_map(|(i, (_, s))| {
        let x = (i + 1) as f64;
        [Some((x, s.whisker_low)), Some((x, s.whisker_high)), s.min_outlier.map(|v| (x, v)), s.max_outlier.map(|v| (x, v))]
            .into_iter()
            .flatten()
    });
    let mut b = Bounds::around(extent);
    b.x0 = 0.5;
    b.x1 = groups.len() as f64 + 0.5;
    let mut out = String::new();
    frame(&mut out, &b, labels, false);
    for (i, (name, _)) in groups.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            b.px((i + 1) as f64),
            HEIGHT - BOTTOM + 16.0,
            escape(name)
        );
    }
    let _ = writeln!(out, r#"<g class="data" transform="{}" fill="none" stroke="black">"#, b.transform());
    let mut outliers = Vec::new();
    for (i, (_, s)) in groups.iter().enumerate() {
        let x = (i + 1) as f64;
        let (l, r) = (x - 0.3, x + 0.3);
        let _ = writeln!(
            out,
            r##"<path class="box" d="M{l} {q1} H{r} V{q3} H{l} Z M{l} {m} H{r}" fill="#dce6f1" vector-effect="non-scaling-stroke"/>"##,
            q1 = s.q1,
            q3 = s.q3,
            m = s.median
        );
        let _ = writeln!(
            out,
            r#"<path class="whiskers" d="M{x} {q1} V{wl} M{x} {q3} V{wh} M{a} {wl} H{c} M{a} {wh} H{c}" vector-effect="non-scaling-stroke"/>"#,
            q1 = s.q1,
            q3 = s.q3,
            wl = s.whisker_low,
            wh = s.whisker_high,
            a = x - 0.15,
            c = x + 0.15
        );
        outliers.extend(s.min_outlier.into_iter().chain(s.max_outlier).map(|v| (x, v)));
    }
    if !outliers.is_empty() {
        let _ = writeln!(
            out,
            r##"<path class="markers" d="{}" stroke="#b22222" stroke-width="5" stroke-linecap="round" vector-effect="non-scaling-stroke"/>"##,
            markers(&outliers)
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

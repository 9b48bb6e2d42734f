//! Minimal SVG line plots.

use std::fmt::Write;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const MAX_POINTS: usize = 2000;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Plot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub series: &'a [Series],
    /// Drawn dashed and grey under the series.
    pub reference: Option<&'a [(f64, f64)]>,
    pub labels: &'a [(f64, f64, String)],
    pub equal_aspect: bool,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn nice_step(range: f64) -> f64 {
    let raw = range / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let m = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn bounds<'a>(all: impl Iterator<Item = &'a (f64, f64)>) -> Option<(f64, f64, f64, f64)> {
    let mut b: Option<(f64, f64, f64, f64)> = None;
    for &(x, y) in all.filter(|p| p.0.is_finite() && p.1.is_finite()) {
        b = Some(match b {
            None => (x, x, y, y),
            Some((a, c, d, e)) => (a.min(x), c.max(x), d.min(y), e.max(y)),
        });
    }
    b
}

fn polyline(out: &mut String, frame: &Frame, pts: &[(f64, f64)], attrs: &str) {
    let stride = pts.len().div_ceil(MAX_POINTS).max(1);
    let mut coords = String::new();
    for (i, &(x, y)) in pts.iter().enumerate() {
        if (i % stride == 0 || i + 1 == pts.len()) && x.is_finite() && y.is_finite() {
            let _ = write!(coords, "{:.2},{:.2} ", frame.px(x), frame.py(y));
        }
    }
    let _ = writeln!(out, r#"<polyline {attrs} fill="none" points="{}"/>"#, coords.trim_end());
}

pub fn render(plot: &Plot<'_>) -> String {
    let all = plot
        .series
        .iter()
        .flat_map(|s| s.points.iter())
        .chain(plot.reference.unwrap_or(&[]).iter());
    let (mut x0, mut x1, mut y0, mut y1) = bounds(all).unwrap_or((0.0, 1.0, 0.0, 1.0));
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad_y = 0.05 * (y1 - y0);
    y0 -= pad_y;
    y1 += pad_y;
    if plot.equal_aspect {
        let w = WIDTH - LEFT - RIGHT;
        let h = HEIGHT - TOP - BOTTOM;
        let scale = ((x1 - x0) / w).max((y1 - y0) / h);
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        x0 = cx - 0.5 * scale * w;
        x1 = cx + 0.5 * scale * w;
        y0 = cy - 0.5 * scale * h;
        y1 = cy + 0.5 * scale * h;
    }
    let frame = Frame { x0, x1, y0, y1 };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        0.5 * WIDTH,
        escape(plot.title)
    );
    let (l, r, t, b) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(out, r##"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="#444"/>"##, r - l, b - t);
    for (lo, hi, vertical) in [(x0, x1, true), (y0, y1, false)] {
        let step = nice_step(hi - lo);
        let mut v = (lo / step).ceil() * step;
        while v <= hi + 1e-9 * step {
            let label = if v.abs() < 1e-9 * step { 0.0 } else { v };
            if vertical {
                let x = frame.px(v);
                let _ = writeln!(out, r##"<line x1="{x:.2}" y1="{t}" x2="{x:.2}" y2="{b}" stroke="#ddd"/>"##);
                let _ = writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{label}</text>"#, b + 16.0);
            } else {
                let y = frame.py(v);
                let _ = writeln!(out, r##"<line x1="{l}" y1="{y:.2}" x2="{r}" y2="{y:.2}" stroke="#ddd"/>"##);
                let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{label}</text>"#, l - 6.0, y + 4.0);
            }
            v += step;
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        0.5 * (l + r),
        HEIGHT - 10.0,
        escape(plot.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        0.5 * (t + b),
        0.5 * (t + b),
        escape(plot.y_label)
    );
    if let Some(reference) = plot.reference {
        polyline(&mut out, &frame, reference, r##"class="reference" stroke="#999" stroke-dasharray="6 4""##);
    }
    for (i, s) in plot.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let attrs = format!(
            r#"class="series" data-name="{}" stroke="{color}" stroke-width="1.5""#,
            escape(&s.name)
        );
        polyline(&mut out, &frame, &s.points, &attrs);
        let ly = t + 16.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            r + 10.0,
            r + 30.0
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, r + 36.0, ly + 4.0, escape(&s.name));
    }
    for (x, y, text) in plot.labels {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            frame.px(*x),
            frame.py(*y),
            frame.px(*x) + 5.0,
            frame.py(*y) - 5.0,
            escape(text)
        );
    }
    out.push_str("</svg>\n");
    out
}

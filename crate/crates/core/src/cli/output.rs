// SPDX-License-Identifier: Apache-2.0

//! CSV tables and a bare SVG polyline plot. Numbers use Rust's shortest
//! round-trip `{:e}` form so output is byte-stable.

use std::fmt::Write as _;

pub struct Table {
    pub header: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { header: Vec::new(), columns, rows: Vec::new() }
    }

    pub fn comment(mut self, line: impl Into<String>) -> Self {
        self.header.push(line.into());
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for h in &self.header {
            let _ = writeln!(out, "# {h}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }
}

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

/// Plot-area mapping shared by the emitter and its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub log_y: bool,
}

impl Frame {
    pub fn fit(points: &[(f64, f64)], log_y: bool) -> Self {
        let ty = |y: f64| if log_y { y.log10() } else { y };
        let range = |it: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi > lo {
                (lo, hi)
            } else {
                let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
                (lo - pad, hi + pad)
            }
        };
        Self {
            x_range: range(&mut points.iter().map(|p| p.0)),
            y_range: range(&mut points.iter().map(|p| ty(p.1))),
            log_y,
        }
    }

    pub fn to_pixels(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let y = if self.log_y { y.log10() } else { y };
        let u = (x - self.x_range.0) / (self.x_range.1 - self.x_range.0);
        let v = (y - self.y_range.0) / (self.y_range.1 - self.y_range.0);
        (MARGIN + u * (WIDTH - 2.0 * MARGIN), HEIGHT - MARGIN - v * (HEIGHT - 2.0 * MARGIN))
    }

    pub fn from_pixels(&self, (px, py): (f64, f64)) -> (f64, f64) {
        let u = (px - MARGIN) / (WIDTH - 2.0 * MARGIN);
        let v = (HEIGHT - MARGIN - py) / (HEIGHT - 2.0 * MARGIN);
        let x = self.x_range.0 + u * (self.x_range.1 - self.x_range.0);
        let y = self.y_range.0 + v * (self.y_range.1 - self.y_range.0);
        (x, if self.log_y { 10f64.powf(y) } else { y })
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One polyline through `points` with axis labels and the data range in
/// the corners. Callers must drop non-positive `y` before asking for `log_y`.
pub fn svg_polyline(points: &[(f64, f64)], log_y: bool, x_label: &str, y_label: &str) -> String {
    let frame = Frame::fit(points, log_y);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (x0, x1) = (MARGIN, WIDTH - MARGIN);
    let (y0, y1) = (HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(
        out,
        r#"<path d="M {x0} {y1} L {x0} {y0} L {x1} {y0}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    let coords: Vec<String> = points
        .iter()
        .map(|&p| {
            let (px, py) = frame.to_pixels(p);
            format!("{px:.6},{py:.6}")
        })
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        coords.join(" ")
    );
    let ys = |v: f64| if log_y { 10f64.powf(v) } else { v };
    let _ = writeln!(
        out,
        r#"<text x="{x0}" y="{}" font-size="12">{}</text>"#,
        HEIGHT - 20.0,
        escape(&format!("{x_label}: {:e} .. {:e}", frame.x_range.0, frame.x_range.1))
    );
    let _ = writeln!(
        out,
        r#"<text x="{x0}" y="30" font-size="12">{}</text>"#,
        escape(&format!(
            "{y_label}{}: {:e} .. {:e}",
            if log_y { " (log)" } else { "" },
            ys(frame.y_range.0),
            ys(frame.y_range.1)
        ))
    );
    out.push_str("</svg>\n");
    out
}

/// Pixel coordinates listed in the first `points="…"` attribute.
pub fn polyline_pixels(svg: &str) -> Vec<(f64, f64)> {
    let Some(start) = svg.find("points=\"") else { return Vec::new() };
    let rest = &svg[start + 8..];
    let body = &rest[..rest.find('"').unwrap_or(0)];
    body.split_whitespace()
        .filter_map(|pair| {
            let (a, b) = pair.split_once(',')?;
            Some((a.parse().ok()?, b.parse().ok()?))
        })
        .collect()
}

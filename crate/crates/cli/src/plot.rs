//! A small SVG writer for line, scatter, histogram and heatmap plots.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 440.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#555555"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Dashed,
    Points,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, style: Style) -> Self {
        Series {
            label: label.into(),
            points,
            style,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = write!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = write!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + (W - LEFT - RIGHT) / 2.0,
        escape(title)
    );
}

/// Maps data to pixels on one axis.
#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
    px0: f64,
    px1: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool, px0: f64, px1: f64) -> Axis {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
            (lo, hi) = (lo - pad, hi + pad);
        } else {
            let pad = 0.05 * (hi - lo);
            (lo, hi) = (lo - pad, hi + pad);
        }
        Axis { lo, hi, log, px0, px1 }
    }

    fn map(&self, v: f64) -> Option<f64> {
        if !v.is_finite() || (self.log && v <= 0.0) {
            return None;
        }
        let v = if self.log { v.log10() } else { v };
        Some(self.px0 + (v - self.lo) / (self.hi - self.lo) * (self.px1 - self.px0))
    }

    /// Tick positions in data units.
    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.floor() as i32, self.hi.ceil() as i32);
            let decades: Vec<f64> = (a..=b).map(|e| 10f64.powi(e)).filter(|&v| self.inside(v)).collect();
            if decades.len() >= 2 {
                return decades;
            }
            let mut t = Vec::new();
            for e in a..=b {
                for m in [1.0, 2.0, 5.0] {
                    let v = m * 10f64.powi(e);
                    if self.inside(v) {
                        t.push(v);
                    }
                }
            }
            return t;
        }
        let span = self.hi - self.lo;
        let raw = span / 5.0;
        let e = raw.log10().floor() as i32;
        let mag = 10f64.powi(e);
        let m = [1.0, 2.0, 5.0, 10.0].into_iter().find(|m| span / (m * mag) <= 6.0).unwrap_or(10.0);
        let step = m * mag;
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        // dividing by an exact power of ten keeps ticks like 0.6 clean
        (first..=last)
            .map(|k| if e < 0 { k as f64 * m / 10f64.powi(-e) } else { k as f64 * step })
            .collect()
    }

    fn inside(&self, v: f64) -> bool {
        let x = if self.log { v.log10() } else { v };
        x >= self.lo && x <= self.hi
    }
}

fn label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-3 {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn frame(out: &mut String, xa: &Axis, ya: &Axis, x_label: &str, y_label: &str) {
    let (x0, x1, y0, y1) = (LEFT, W - RIGHT, H - BOTTOM, TOP);
    let _ = write!(
        out,
        r##"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="#000"/>"##,
        x1 - x0,
        y0 - y1
    );
    for t in xa.ticks() {
        if let Some(px) = xa.map(t) {
            let _ = write!(
                out,
                r##"<line x1="{px:.1}" y1="{y0}" x2="{px:.1}" y2="{}" stroke="#000"/><text x="{px:.1}" y="{}" text-anchor="middle">{}</text>"##,
                y0 + 5.0,
                y0 + 18.0,
                label(t)
            );
        }
    }
    for t in ya.ticks() {
        if let Some(py) = ya.map(t) {
            let _ = write!(
                out,
                r##"<line x1="{}" y1="{py:.1}" x2="{x0}" y2="{py:.1}" stroke="#000"/><text x="{}" y="{:.1}" text-anchor="end">{}</text>"##,
                x0 - 5.0,
                x0 - 8.0,
                py + 4.0,
                label(t)
            );
        }
    }
    let _ = write!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        H - 14.0,
        escape(x_label)
    );
    let _ = write!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn legend(out: &mut String, entries: &[(&str, &str, Style)]) {
    for (i, (name, color, style)) in entries.iter().enumerate() {
        let y = TOP + 14.0 + 18.0 * i as f64;
        let x = W - RIGHT + 12.0;
        match style {
            Style::Points => {
                let _ = write!(out, r#"<circle cx="{}" cy="{y}" r="3" fill="{color}"/>"#, x + 10.0);
            }
            _ => {
                let dash = if *style == Style::Dashed { r#" stroke-dasharray="5 3""# } else { "" };
                let _ = write!(
                    out,
                    r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"{dash}/>"#,
                    x + 20.0
                );
            }
        }
        let _ = write!(out, r#"<text x="{}" y="{}">{}</text>"#, x + 26.0, y + 4.0, escape(name));
    }
}

impl Plot {
    pub fn to_svg(&self) -> String {
        let xa = Axis::fit(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), self.log_x, LEFT, W - RIGHT);
        let ya = Axis::fit(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)), self.log_y, H - BOTTOM, TOP);
        let mut out = String::new();
        header(&mut out, &self.title);
        frame(&mut out, &xa, &ya, &self.x_label, &self.y_label);
        let mut entries = Vec::new();
        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let px: Vec<(f64, f64)> = s
                .points
                .iter()
                .filter_map(|&(x, y)| Some((xa.map(x)?, ya.map(y)?)))
                .collect();
            match s.style {
                Style::Points => {
                    for (x, y) in &px {
                        let _ = write!(out, r#"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="{color}"/>"#);
                    }
                }
                Style::Line | Style::Dashed => {
                    if px.len() >= 2 {
                        let path: Vec<String> = px.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
                        let dash = if s.style == Style::Dashed { r#" stroke-dasharray="5 3""# } else { "" };
                        let _ = write!(
                            out,
                            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                            path.join(" ")
                        );
                    }
                }
            }
            entries.push((s.label.as_str(), color, s.style));
        }
        legend(&mut out, &entries);
        out.push_str("</svg>\n");
        out
    }
}

/// Overlaid histograms sharing the bin edges `edges` (`counts[k].len() == edges.len() - 1`).
pub fn histogram(title: &str, x_label: &str, edges: &[f64], counts: &[(&str, Vec<f64>)]) -> String {
    let xa = Axis::fit(edges.iter().copied(), false, LEFT, W - RIGHT);
    let ya = Axis::fit(counts.iter().flat_map(|c| c.1.iter().copied()).chain([0.0]), false, H - BOTTOM, TOP);
    let mut out = String::new();
    header(&mut out, title);
    frame(&mut out, &xa, &ya, x_label, "count");
    let mut entries = Vec::new();
    for (i, (name, c)) in counts.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        // outline of the bars as one step path
        let base = ya.map(0.0).unwrap_or(H - BOTTOM);
        let mut pts = vec![format!("{:.1},{base:.1}", xa.map(edges[0]).unwrap_or(LEFT))];
        for (k, v) in c.iter().enumerate() {
            let (a, b, y) = (xa.map(edges[k]), xa.map(edges[k + 1]), ya.map(*v));
            if let (Some(a), Some(b), Some(y)) = (a, b, y) {
                pts.push(format!("{a:.1},{y:.1}"));
                pts.push(format!("{b:.1},{y:.1}"));
            }
        }
        pts.push(format!("{:.1},{base:.1}", xa.map(edges[edges.len() - 1]).unwrap_or(W - RIGHT)));
        let _ = write!(
            out,
            r#"<polyline points="{}" fill="{color}" fill-opacity="0.25" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        entries.push((*name, color, Style::Line));
    }
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

/// Heatmap of `values[ix * ny + iy]` with `x` across and `y` upward.
pub fn heatmap(title: &str, x_label: &str, y_label: &str, nx: usize, ny: usize, values: &[f64]) -> String {
    assert_eq!(values.len(), nx * ny);
    let (x0, x1, y0, y1) = (LEFT, W - RIGHT, H - BOTTOM, TOP);
    let lo = values.iter().copied().filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let (cw, ch) = ((x1 - x0) / nx as f64, (y0 - y1) / ny as f64);
    let mut out = String::new();
    header(&mut out, title);
    for ix in 0..nx {
        for iy in 0..ny {
            let v = values[ix * ny + iy];
            let t = if v.is_finite() { ((v - lo) / span).clamp(0.0, 1.0) } else { 0.0 };
            let _ = write!(
                out,
                r#"<rect x="{:.1}" y="{:.1}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                x0 + ix as f64 * cw,
                y0 - (iy + 1) as f64 * ch,
                cw + 0.3,
                ch + 0.3,
                ramp(t)
            );
        }
    }
    let _ = write!(
        out,
        r##"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="#000"/>"##,
        x1 - x0,
        y0 - y1
    );
    let _ = write!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, H - 14.0, escape(x_label));
    let _ = write!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
    let _ = write!(
        out,
        r#"<text x="{}" y="{}">max {}</text><text x="{}" y="{}">min {}</text>"#,
        x1 + 12.0,
        y1 + 14.0,
        label(hi),
        x1 + 12.0,
        y1 + 32.0,
        label(lo)
    );
    out.push_str("</svg>\n");
    out
}

/// White through blue to dark red.
fn ramp(t: f64) -> String {
    let stops = [(255.0, 255.0, 255.0), (49.0, 130.0, 189.0), (165.0, 15.0, 21.0)];
    let (a, b, u) = if t < 0.5 { (stops[0], stops[1], t * 2.0) } else { (stops[1], stops[2], t * 2.0 - 1.0) };
    let mix = |p: f64, q: f64| (p + (q - p) * u).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Counts of `values` in `bins` equal bins over `[lo, hi]`; values outside are clamped in.
pub fn bin_counts(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut c = vec![0.0; bins];
    for &v in values.iter().filter(|v| v.is_finite()) {
        let k = (((v - lo) / (hi - lo)) * bins as f64).floor();
        c[(k.max(0.0) as usize).min(bins - 1)] += 1.0;
    }
    c
}

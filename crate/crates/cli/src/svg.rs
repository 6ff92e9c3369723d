//! Self-contained SVG line and stem charts.

use std::fmt::Write;

pub const FOURIER_COLOR: &str = "red";
pub const HERMITE_COLOR: &str = "blue";

const PANEL_WIDTH: f64 = 900.0;
const PANEL_HEIGHT: f64 = 260.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 45.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    /// Polyline with a marker at every point.
    Line,
    /// Vertical stem from zero to each point.
    Stem,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub style: Style,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(
        label: impl Into<String>,
        color: &'static str,
        style: Style,
        points: Vec<(f64, f64)>,
    ) -> Self {
        Series {
            label: label.into(),
            color,
            style,
            points,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
}

impl Panel {
    pub fn new(
        title: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
    ) -> Self {
        Panel {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            ..Default::default()
        }
    }

    pub fn log_y(mut self) -> Self {
        self.log_y = true;
        self
    }

    pub fn with(mut self, series: Series) -> Self {
        self.series.push(series);
        self
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// About five evenly spaced round values covering `[lo, hi]`.
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

struct Frame {
    x0: f64,
    y0: f64,
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
    log_y: bool,
}

impl Frame {
    fn plot_w() -> f64 {
        PANEL_WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    }

    fn plot_h() -> f64 {
        PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    }

    fn x(&self, v: f64) -> f64 {
        self.x0 + MARGIN_LEFT + (v - self.x_lo) / (self.x_hi - self.x_lo) * Self::plot_w()
    }

    fn y_value(&self, v: f64) -> f64 {
        if self.log_y {
            v.max(f64::MIN_POSITIVE).log10()
        } else {
            v
        }
    }

    fn y(&self, v: f64) -> f64 {
        let t = (self.y_value(v) - self.y_lo) / (self.y_hi - self.y_lo);
        self.y0 + MARGIN_TOP + (1.0 - t) * Self::plot_h()
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        let pad = lo.abs().max(1.0) * 0.5;
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn render_panel(out: &mut String, panel: &Panel, y0: f64) {
    let points = || panel.series.iter().flat_map(|s| s.points.iter().copied());
    let x_lo = points().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_hi = points().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let ys: Vec<f64> = points()
        .map(|p| p.1)
        .filter(|y| !panel.log_y || *y > 0.0)
        .map(|y| if panel.log_y { y.log10() } else { y })
        .collect();
    let mut y_lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let mut y_hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !panel.log_y && panel.series.iter().any(|s| s.style == Style::Stem) {
        y_lo = y_lo.min(0.0);
        y_hi = y_hi.max(0.0);
    }
    let (x_lo, x_hi) = padded(x_lo, x_hi);
    let (y_lo, y_hi) = if panel.log_y {
        let (lo, hi) = if y_lo.is_finite() {
            (y_lo.floor(), y_hi.ceil())
        } else {
            (-1.0, 0.0)
        };
        if hi > lo {
            (lo, hi)
        } else {
            (lo - 1.0, hi + 1.0)
        }
    } else {
        padded(y_lo, y_hi)
    };
    let frame = Frame {
        x0: 0.0,
        y0,
        x_lo,
        x_hi,
        y_lo,
        y_hi,
        log_y: panel.log_y,
    };

    let left = MARGIN_LEFT;
    let top = y0 + MARGIN_TOP;
    let (w, h) = (Frame::plot_w(), Frame::plot_h());
    let _ = writeln!(
        out,
        r#"<rect x="{left:.2}" y="{top:.2}" width="{w:.2}" height="{h:.2}" fill="white" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="15">{}</text>"#,
        left + w / 2.0,
        y0 + MARGIN_TOP - 10.0,
        escape(&panel.title)
    );

    for tx in nice_ticks(x_lo, x_hi) {
        let px = frame.x(tx);
        let _ = writeln!(
            out,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#ddd"/><text x="{px:.2}" y="{:.2}" text-anchor="middle" font-size="11">{}</text>"##,
            top,
            top + h,
            top + h + 15.0,
            tick_label(tx)
        );
    }
    let y_ticks: Vec<(f64, String)> = if panel.log_y {
        (y_lo as i64..=y_hi as i64)
            .map(|d| (d as f64, format!("1e{d}")))
            .collect()
    } else {
        nice_ticks(y_lo, y_hi)
            .into_iter()
            .map(|t| (t, tick_label(t)))
            .collect()
    };
    for (ty, label) in y_ticks {
        let t = (ty - y_lo) / (y_hi - y_lo);
        let py = top + (1.0 - t) * h;
        let _ = writeln!(
            out,
            r##"<line x1="{left:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{label}</text>"##,
            left + w,
            left - 6.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"#,
        left + w / 2.0,
        top + h + 35.0,
        escape(&panel.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{:.2}" text-anchor="middle" font-size="12" transform="rotate(-90 15 {:.2})">{}</text>"#,
        top + h / 2.0,
        top + h / 2.0,
        escape(&panel.y_label)
    );

    for (k, series) in panel.series.iter().enumerate() {
        let visible: Vec<(f64, f64)> = series
            .points
            .iter()
            .copied()
            .filter(|p| !panel.log_y || p.1 > 0.0)
            .collect();
        match series.style {
            Style::Line => {
                let coords: Vec<String> = visible
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", frame.x(x), frame.y(y)))
                    .collect();
                let _ = writeln!(
                    out,
                    r#"<polyline data-series="{}" points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                    escape(&series.label),
                    coords.join(" "),
                    series.color
                );
                if visible.len() <= 60 {
                    for &(x, y) in &visible {
                        let _ = writeln!(
                            out,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
                            frame.x(x),
                            frame.y(y),
                            series.color
                        );
                    }
                }
            }
            Style::Stem => {
                let base = if panel.log_y { 10f64.powf(y_lo) } else { 0.0 };
                let mut d = String::new();
                for &(x, y) in &visible {
                    let _ = write!(
                        d,
                        "M{:.2} {:.2}V{:.2}",
                        frame.x(x),
                        frame.y(base),
                        frame.y(y)
                    );
                }
                let _ = writeln!(
                    out,
                    r#"<path data-series="{}" d="{d}" stroke="{}" stroke-width="1"/>"#,
                    escape(&series.label),
                    series.color
                );
            }
        }
        // legend
        let lx = left + w - 150.0;
        let ly = top + 14.0 + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            lx + 20.0,
            series.color,
            lx + 26.0,
            ly + 4.0,
            escape(&series.label)
        );
    }
}

/// Stacks `panels` vertically into one SVG document. `comment` (e.g. a
/// generation timestamp) is embedded as an XML comment when given.
pub fn render(panels: &[Panel], comment: Option<&str>) -> String {
    let height = PANEL_HEIGHT * panels.len().max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{PANEL_WIDTH}" height="{height}" viewBox="0 0 {PANEL_WIDTH} {height}" font-family="sans-serif">"#
    );
    if let Some(c) = comment {
        let _ = writeln!(out, "<!-- {} -->", c.replace("--", "- -"));
    }
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, panel) in panels.iter().enumerate() {
        render_panel(&mut out, panel, PANEL_HEIGHT * i as f64);
    }
    out.push_str("</svg>\n");
    out
}

//! Minimal SVG line and bar charts.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    /// Tick labels replacing numeric x ticks, placed at x = 0, 1, 2, …
    pub x_categories: Option<Vec<String>>,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        escape(title)
    );
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn axes(out: &mut String, x_label: &str, y_label: &str) {
    let (x0, y0, x1, y1) = (LEFT, TOP, WIDTH - RIGHT, HEIGHT - BOTTOM);
    let _ = writeln!(
        out,
        r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y1 - y0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn y_ticks(out: &mut String, lo: f64, hi: f64, map: impl Fn(f64) -> f64) {
    for t in nice_ticks(lo, hi) {
        let y = map(t);
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT}" x2="{}" y1="{y:.2}" y2="{y:.2}" stroke="#ddd"/>"##,
            WIDTH - RIGHT
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 1000.0 && (v / 1000.0).fract() == 0.0 {
        format!("{}k", v / 1000.0)
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    }
}

fn legend(out: &mut String, names: impl Iterator<Item = String>) {
    for (i, name) in names.enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let x = WIDTH - RIGHT + 12.0;
        let c = COLORS[i % COLORS.len()];
        let _ = writeln!(
            out,
            r#"<rect x="{x}" y="{}" width="14" height="4" fill="{c}"/>"#,
            y - 4.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}">{}</text>"#,
            x + 20.0,
            y + 1.0,
            escape(&name)
        );
    }
}

impl LinePlot {
    pub fn render(&self) -> String {
        let tx = |x: f64| if self.log_x { x.log10() } else { x };
        let pts = || {
            self.series
                .iter()
                .flat_map(|s| s.points.iter())
                .filter(|p| !self.log_x || p.0 > 0.0)
        };
        let (xl, xh) = {
            let (lo, hi) = range(pts().map(|p| tx(p.0)));
            if self.log_x || self.x_categories.is_some() {
                let (a, b) = pts()
                    .map(|p| tx(p.0))
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                        (a.min(v), b.max(v))
                    });
                if a.is_finite() && b > a {
                    let pad = if self.x_categories.is_some() {
                        0.3
                    } else {
                        0.0
                    };
                    (a - pad, b + pad)
                } else {
                    (lo, hi)
                }
            } else {
                (lo, hi)
            }
        };
        let (yl, yh) = range(pts().map(|p| p.1));
        let (x0, y0, x1, y1) = (LEFT, TOP, WIDTH - RIGHT, HEIGHT - BOTTOM);
        let mx = |x: f64| x0 + (tx(x) - xl) / (xh - xl) * (x1 - x0);
        let my = |y: f64| y1 - (y - yl) / (yh - yl) * (y1 - y0);

        let mut out = String::new();
        header(&mut out, &self.title);
        y_ticks(&mut out, yl, yh, my);
        if let Some(cats) = &self.x_categories {
            for (i, c) in cats.iter().enumerate() {
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
                    mx(i as f64),
                    y1 + 18.0,
                    escape(c)
                );
            }
        } else if self.log_x {
            let mut decade = 10f64.powf(xl.floor());
            while decade.log10() <= xh {
                for m in [1.0, 2.0, 5.0] {
                    let v = decade * m;
                    if (xl..=xh).contains(&v.log10()) {
                        let x = mx(v);
                        let _ = writeln!(
                            out,
                            r##"<line x1="{x:.2}" x2="{x:.2}" y1="{y0}" y2="{y1}" stroke="#ddd"/>"##
                        );
                        let _ = writeln!(
                            out,
                            r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
                            y1 + 18.0,
                            fmt_tick(v)
                        );
                    }
                }
                decade *= 10.0;
            }
        } else {
            for t in nice_ticks(xl, xh) {
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
                    mx(t),
                    y1 + 18.0,
                    fmt_tick(t)
                );
            }
        }
        axes(&mut out, &self.x_label, &self.y_label);
        for (i, s) in self.series.iter().enumerate() {
            let c = COLORS[i % COLORS.len()];
            let mut d = String::new();
            for &(x, y) in s
                .points
                .iter()
                .filter(|p| (!self.log_x || p.0 > 0.0) && p.1.is_finite())
            {
                let _ = write!(
                    d,
                    "{}{:.2},{:.2}",
                    if d.is_empty() { "M" } else { " L" },
                    mx(x),
                    my(y)
                );
            }
            let _ = writeln!(
                out,
                r#"<path d="{d}" fill="none" stroke="{c}" stroke-width="1.5"/>"#
            );
            if self.x_categories.is_some() {
                for &(x, y) in &s.points {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}"/>"#,
                        mx(x),
                        my(y)
                    );
                }
            }
        }
        legend(&mut out, self.series.iter().map(|s| s.name.clone()));
        out.push_str("</svg>\n");
        out
    }
}

/// Grouped bars: one group per category, one bar per series.
pub fn bar_chart(
    title: &str,
    y_label: &str,
    categories: &[String],
    series: &[(String, Vec<f64>)],
) -> String {
    let (_, yh) = range(series.iter().flat_map(|s| s.1.iter().copied()).chain([0.0]));
    let yl = 0.0;
    let (x0, y0, x1, y1) = (LEFT, TOP, WIDTH - RIGHT, HEIGHT - BOTTOM);
    let my = |y: f64| y1 - (y - yl) / (yh - yl) * (y1 - y0);
    let group = (x1 - x0) / categories.len().max(1) as f64;
    let bar = 0.8 * group / series.len().max(1) as f64;

    let mut out = String::new();
    header(&mut out, title);
    y_ticks(&mut out, yl, yh, my);
    for (g, cat) in categories.iter().enumerate() {
        let gx = x0 + group * g as f64 + 0.1 * group;
        for (i, (_, values)) in series.iter().enumerate() {
            let v = values.get(g).copied().unwrap_or(0.0);
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{bar:.2}" height="{:.2}" fill="{}"/>"#,
                gx + bar * i as f64,
                my(v),
                my(yl) - my(v),
                COLORS[i % COLORS.len()]
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            x0 + group * (g as f64 + 0.5),
            y1 + 18.0,
            escape(cat)
        );
    }
    axes(&mut out, "", y_label);
    legend(&mut out, series.iter().map(|s| s.0.clone()));
    out.push_str("</svg>\n");
    out
}

//! Minimal SVG line and bar charts for the report files.

use std::fmt::Write;

const W: f64 = 720.0;
const H: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

pub fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = write!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = write!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, W / 2.0, escape(title));
}

fn axes(out: &mut String, x_label: &str, y_label: &str) {
    let (x0, y0, x1, y1) = (LEFT, H - BOTTOM, W - RIGHT, TOP);
    let _ = write!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
    let _ = write!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
    let _ = write!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        H - 18.0,
        escape(x_label)
    );
    let _ = write!(
        out,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn legend(out: &mut String, names: &[String]) {
    for (i, n) in names.iter().enumerate() {
        let y = TOP + 16.0 * i as f64;
        let c = PALETTE[i % PALETTE.len()];
        let _ = write!(out, r#"<rect x="{}" y="{}" width="10" height="10" fill="{c}"/>"#, W - RIGHT + 12.0, y);
        let _ = write!(out, r#"<text x="{}" y="{}">{}</text>"#, W - RIGHT + 26.0, y + 9.0, escape(n));
    }
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn empty_note(out: &mut String) {
    let _ = write!(out, r#"<text x="{}" y="{}" text-anchor="middle" fill="gray">no data</text>"#, W / 2.0, H / 2.0);
}

#[derive(Clone, Debug, Default)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Default)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<Series>,
}

struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Scale {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
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
            lo -= 0.5;
            hi += 0.5;
        }
        Scale { lo, hi, log }
    }

    fn frac(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            (self.lo.floor() as i32..=self.hi.ceil() as i32)
                .map(|e| 10f64.powi(e))
                .filter(|t| (self.frac(*t) >= -1e-9) && self.frac(*t) <= 1.0 + 1e-9)
                .collect()
        } else {
            (0..=4).map(|i| self.lo + (self.hi - self.lo) * i as f64 / 4.0).collect()
        }
    }
}

impl LineChart {
    pub fn render(&self) -> String {
        let mut out = String::new();
        header(&mut out, &self.title);
        axes(&mut out, &self.x_label, &self.y_label);
        let all = || self.series.iter().flat_map(|s| s.points.iter());
        if all().next().is_none() {
            empty_note(&mut out);
            out.push_str("</svg>\n");
            return out;
        }
        let xs = Scale::new(all().map(|p| p.0), self.log_x);
        let ys = Scale::new(all().map(|p| p.1), false);
        let px = |x: f64| LEFT + xs.frac(x) * (W - LEFT - RIGHT);
        let py = |y: f64| H - BOTTOM - ys.frac(y) * (H - TOP - BOTTOM);
        for t in xs.ticks() {
            let _ = write!(
                out,
                r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
                px(t),
                H - BOTTOM + 16.0,
                fmt_tick(t)
            );
        }
        for t in ys.ticks() {
            let _ = write!(
                out,
                r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                py(t) + 4.0,
                fmt_tick(t)
            );
        }
        for (i, s) in self.series.iter().enumerate() {
            let c = PALETTE[i % PALETTE.len()];
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite() && (!self.log_x || p.0 > 0.0))
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            if pts.is_empty() {
                continue;
            }
            let _ =
                write!(out, r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
            if pts.len() <= 30 {
                for p in &pts {
                    let (x, y) = p.split_once(',').expect("formatted pair");
                    let _ = write!(out, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{c}"/>"#);
                }
            }
        }
        legend(&mut out, &self.series.iter().map(|s| s.name.clone()).collect::<Vec<_>>());
        out.push_str("</svg>\n");
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct BarChart {
    pub title: String,
    pub y_label: String,
    pub groups: Vec<String>,
    /// One value per group; `None` leaves a gap.
    pub series: Vec<(String, Vec<Option<f64>>)>,
}

impl BarChart {
    pub fn render(&self) -> String {
        let mut out = String::new();
        header(&mut out, &self.title);
        axes(&mut out, "", &self.y_label);
        let max = self.series.iter().flat_map(|s| s.1.iter().flatten()).fold(0.0f64, |m, v| m.max(*v));
        if self.groups.is_empty() || max <= 0.0 {
            empty_note(&mut out);
            out.push_str("</svg>\n");
            return out;
        }
        let plot_w = W - LEFT - RIGHT;
        let plot_h = H - TOP - BOTTOM;
        let gw = plot_w / self.groups.len() as f64;
        let bw = gw * 0.8 / self.series.len().max(1) as f64;
        for (g, name) in self.groups.iter().enumerate() {
            let _ = write!(
                out,
                r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
                LEFT + gw * (g as f64 + 0.5),
                H - BOTTOM + 16.0,
                escape(name)
            );
            for (s, (_, vals)) in self.series.iter().enumerate() {
                if let Some(Some(v)) = vals.get(g) {
                    let h = v / max * plot_h;
                    let x = LEFT + gw * g as f64 + gw * 0.1 + bw * s as f64;
                    let _ = write!(
                        out,
                        r#"<rect x="{x:.1}" y="{:.1}" width="{bw:.1}" height="{h:.1}" fill="{}"/>"#,
                        H - BOTTOM - h,
                        PALETTE[s % PALETTE.len()]
                    );
                }
            }
        }
        for i in 0..=4 {
            let v = max * i as f64 / 4.0;
            let y = H - BOTTOM - plot_h * i as f64 / 4.0;
            let _ =
                write!(out, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, LEFT - 6.0, y + 4.0, fmt_tick(v));
        }
        legend(&mut out, &self.series.iter().map(|s| s.0.clone()).collect::<Vec<_>>());
        out.push_str("</svg>\n");
        out
    }
}

//! Static SVG figures: trajectories on the upper half disk and log-log
//! gate-count plots. Coordinates are printed with fixed precision so the
//! files are byte-stable.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 380.0;
const MARGIN: f64 = 40.0;
const MAX_POINTS: usize = 4000;

pub struct Series<'a> {
    pub points: &'a [(f64, f64)],
    pub color: &'a str,
    pub width: f64,
    pub dashed: bool,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str, provenance: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(out, "<!-- {} -->", escape(provenance).replace("--", "- -"));
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
}

fn polyline(out: &mut String, pts: impl Iterator<Item = (f64, f64)>, color: &str, width: f64, dashed: bool) {
    let mut attr = String::new();
    for (x, y) in pts {
        let _ = write!(attr, "{x:.2},{y:.2} ");
    }
    let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{color}" stroke-width="{width}"{dash} points="{}"/>"#,
        attr.trim_end()
    );
}

fn thin(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if points.len() <= MAX_POINTS {
        return points.to_vec();
    }
    let stride = points.len().div_ceil(MAX_POINTS);
    let mut out: Vec<_> = points.iter().copied().step_by(stride).collect();
    if out.last() != points.last() {
        out.push(*points.last().expect("non-empty"));
    }
    out
}

/// Upper half unit disk with trajectories given as Cartesian points
/// `(r cosφ, r sinφ)` and optional markers.
pub fn half_disk(title: &str, provenance: &str, series: &[Series], markers: &[(f64, f64)]) -> String {
    let scale = (W - 2.0 * MARGIN) / 2.0;
    let cx = W / 2.0;
    let cy = H - MARGIN;
    let map = move |(x, y): (f64, f64)| (cx + scale * x, cy - scale * y);

    let mut out = String::new();
    header(&mut out, title, provenance);
    let _ = writeln!(
        out,
        r##"<path d="M {:.2} {cy:.2} A {scale:.2} {scale:.2} 0 0 1 {:.2} {cy:.2} Z" fill="#f4f6fa" stroke="#555" stroke-width="1"/>"##,
        cx - scale,
        cx + scale
    );
    for k in 1..4 {
        let r = scale * k as f64 / 4.0;
        let _ = writeln!(
            out,
            r##"<path d="M {:.2} {cy:.2} A {r:.2} {r:.2} 0 0 1 {:.2} {cy:.2}" fill="none" stroke="#ccc" stroke-width="0.5"/>"##,
            cx - r,
            cx + r
        );
    }
    for s in series {
        if s.points.is_empty() {
            continue;
        }
        polyline(&mut out, thin(s.points).into_iter().map(map), s.color, s.width, s.dashed);
    }
    for &m in markers {
        let (x, y) = map(m);
        let _ = writeln!(out, r##"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="#d62728"/>"##);
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">-1</text>"#,
        cx - scale,
        cy + 16.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">1</text>"#,
        cx + scale,
        cy + 16.0
    );
    out.push_str("</svg>\n");
    out
}

/// Log-log scatter of `(ε, N_g)` with an optional fitted line
/// `log₁₀N = m + n log₁₀ε`.
pub fn loglog(title: &str, provenance: &str, points: &[(f64, f64)], fit: Option<(f64, f64)>) -> String {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 > 0.0 && p.1 > 0.0)
        .map(|p| (p.0.log10(), p.1.log10()))
        .collect();
    let mut out = String::new();
    header(&mut out, title, provenance);
    if logs.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let pad = |lo: f64, hi: f64| {
        let (lo, hi) = (lo.floor(), hi.ceil());
        if hi > lo { (lo, hi) } else { (lo - 1.0, hi + 1.0) }
    };
    let (x0, x1) = pad(
        logs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        logs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
    );
    let (y0, y1) = pad(
        logs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
        logs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
    );
    let left = MARGIN + 20.0;
    let (pw, ph) = (W - left - MARGIN, H - 2.0 * MARGIN - 10.0);
    let map = |(x, y): (f64, f64)| {
        (
            left + pw * (x - x0) / (x1 - x0),
            MARGIN + 10.0 + ph * (1.0 - (y - y0) / (y1 - y0)),
        )
    };

    let _ = writeln!(
        out,
        r##"<rect x="{left:.2}" y="{:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="#555"/>"##,
        MARGIN + 10.0
    );
    let mut tick = x0;
    while tick <= x1 + 1e-9 {
        let (x, y) = map((tick, y0));
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">1e{}</text>"#,
            y + 16.0,
            tick as i64
        );
        tick += 1.0;
    }
    let mut tick = y0;
    while tick <= y1 + 1e-9 {
        let (x, y) = map((x0, tick));
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">1e{}</text>"#,
            x - 6.0,
            y + 4.0,
            tick as i64
        );
        tick += 1.0;
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">accuracy</text>"#,
        left + pw / 2.0,
        H - 6.0
    );
    if let Some((m, n)) = fit {
        let line = [(x0, m + n * x0), (x1, m + n * x1)];
        polyline(&mut out, line.into_iter().map(map), "#1f77b4", 1.5, true);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">m = {m:.5}, n = {n:.5}</text>"#,
            left + 10.0,
            MARGIN + 28.0
        );
    }
    for &p in &logs {
        let (x, y) = map(p);
        let _ = writeln!(out, r##"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="#d62728"/>"##);
    }
    out.push_str("</svg>\n");
    out
}

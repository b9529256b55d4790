//! Minimal SVG scatter plot: circles for train points, triangles for test.

use std::fmt::Write;

pub struct Point {
    pub x: f64,
    pub y: f64,
    pub class: String,
    pub test: bool,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 56.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn span(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    }
}

pub fn render(points: &[Point], x_name: &str, y_name: &str) -> String {
    let (x0, x1) = span(points.iter().map(|p| p.x));
    let (y0, y1) = span(points.iter().map(|p| p.y));
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut classes: Vec<&str> = points.iter().map(|p| p.class.as_str()).collect();
    classes.sort_unstable();
    classes.dedup();
    let color = |c: &str| PALETTE[classes.iter().position(|k| *k == c).unwrap_or(0) % PALETTE.len()];

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="gray"/>"#,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    for (v, pos) in [(x0, MARGIN), (x1, W - MARGIN)] {
        let _ = writeln!(
            s,
            r#"<text x="{pos}" y="{}" text-anchor="middle">{v:.3e}</text>"#,
            H - MARGIN + 16.0
        );
    }
    for (v, pos) in [(y0, H - MARGIN), (y1, MARGIN)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{pos}" text-anchor="end">{v:.3e}</text>"#,
            MARGIN - 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        W / 2.0,
        H - 12.0,
        escape(x_name)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_name)
    );
    for p in points {
        let (cx, cy) = (px(p.x), py(p.y));
        let c = color(&p.class);
        if p.test {
            let _ = writeln!(
                s,
                r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="none" stroke="{c}"/>"#,
                cx,
                cy - 4.5,
                cx - 4.0,
                cy + 3.0,
                cx + 4.0,
                cy + 3.0
            );
        } else {
            let _ = writeln!(
                s,
                r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="3.5" fill="{c}" fill-opacity="0.7"/>"#
            );
        }
    }
    for (i, c) in classes.iter().enumerate() {
        let y = MARGIN + 14.0 * i as f64 + 10.0;
        let _ = writeln!(
            s,
            r#"<circle cx="{}" cy="{}" r="4" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            W - MARGIN - 80.0,
            y - 4.0,
            color(c),
            W - MARGIN - 72.0,
            y,
            escape(c)
        );
    }
    s.push_str("</svg>\n");
    s
}

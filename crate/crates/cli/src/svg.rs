//! Heatmap rendering of a regular grid as a standalone SVG document.

use std::fmt::Write as _;

/// Colour anchors interpolated into the 256-step ramp (dark blue to yellow).
const ANCHORS: [(f64, [f64; 3]); 5] = [
    (0.0, [68.0, 1.0, 84.0]),
    (0.25, [59.0, 82.0, 139.0]),
    (0.5, [33.0, 145.0, 140.0]),
    (0.75, [94.0, 201.0, 98.0]),
    (1.0, [253.0, 231.0, 37.0]),
];

const CELL: usize = 16;
const MARGIN: usize = 40;

/// Colour of ramp step `k` in `0..256`.
pub fn ramp(k: u8) -> [u8; 3] {
    let s = f64::from(k) / 255.0;
    let i = ANCHORS.iter().rposition(|&(p, _)| p <= s).unwrap_or(0).min(ANCHORS.len() - 2);
    let (p0, c0) = ANCHORS[i];
    let (p1, c1) = ANCHORS[i + 1];
    let w = (s - p0) / (p1 - p0);
    [0, 1, 2].map(|j| (c0[j] + w * (c1[j] - c0[j])).round() as u8)
}

/// Step of `v` on the ramp spanning `[lo, hi]`.
fn step(v: f64, lo: f64, hi: f64) -> u8 {
    if hi > lo {
        (((v - lo) / (hi - lo)) * 255.0).round().clamp(0.0, 255.0) as u8
    } else {
        0
    }
}

/// Renders `values[i * ny + j]` at column `i` (left to right, along `xs`)
/// and row `j` (bottom to top, along `ys`). Non-finite values are grey.
pub fn heatmap(title: &str, x_label: &str, y_label: &str, xs: &[f64], ys: &[f64], values: &[f64]) -> String {
    let (nx, ny) = (xs.len(), ys.len());
    assert_eq!(values.len(), nx * ny, "grid size mismatch");
    let finite = values.iter().copied().filter(|v| v.is_finite());
    let lo = finite.clone().fold(f64::INFINITY, f64::min);
    let hi = finite.fold(f64::NEG_INFINITY, f64::max);
    let (w, h) = (nx * CELL + 2 * MARGIN, ny * CELL + 2 * MARGIN);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for i in 0..nx {
        for j in 0..ny {
            let v = values[i * ny + j];
            let fill = if v.is_finite() {
                let [r, g, b] = ramp(step(v, lo, hi));
                format!("#{r:02x}{g:02x}{b:02x}")
            } else {
                "#808080".to_string()
            };
            let (x, y) = (MARGIN + i * CELL, MARGIN + (ny - 1 - j) * CELL);
            let _ = writeln!(s, r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}"/>"#);
        }
    }
    let text = |s: &mut String, x: usize, y: usize, t: &str| {
        let _ = writeln!(s, r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="11">{}</text>"#, escape(t));
    };
    text(&mut s, MARGIN, MARGIN / 2, title);
    text(&mut s, MARGIN, h - MARGIN / 4, &format!("{x_label} ∈ [{}, {}]", fmt(xs[0]), fmt(xs[nx - 1])));
    text(&mut s, 4, MARGIN - 4, &format!("{y_label} ∈ [{}, {}]", fmt(ys[0]), fmt(ys[ny - 1])));
    text(&mut s, w / 2, h - MARGIN / 4, &format!("colour range [{}, {}]", fmt(lo), fmt(hi)));
    s.push_str("</svg>\n");
    s
}

fn fmt(v: f64) -> String {
    crate::report::format_sig9(v)
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

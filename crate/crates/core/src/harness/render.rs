//! Persistence diagrams as standalone SVG.
//!
//! Layout: a 400×400 canvas with a 40px margin, so the plot square spans
//! 40..360 on both axes. Both axes run over `0..=T+1` with
//! `scale = 320 / (T + 1)`; an interval `[b, d)` is drawn at
//! `x = 40 + b·scale`, `y = 360 − d·scale`, and `d = ∞` is drawn on the
//! dashed row at the value `T + 1` (`y = 40`). Marks are circles of radius 4;
//! repeated intervals get one circle labelled `×m`. Coordinates are printed
//! with two decimals.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::barcode::Barcode;
use crate::ext::ExtNat;

pub const SIZE: f64 = 400.0;
pub const MARGIN: f64 = 40.0;

/// Canvas position of the mark for `[birth, death)` in a diagram over `0..=t`.
pub fn mark_position(t: usize, birth: usize, death: ExtNat) -> (f64, f64) {
    let scale = (SIZE - 2.0 * MARGIN) / (t + 1) as f64;
    let d = death.finite().unwrap_or(t + 1);
    (MARGIN + birth as f64 * scale, SIZE - MARGIN - d as f64 * scale)
}

pub fn render_diagram(barcode: &Barcode, title: &str) -> String {
    let t = barcode.stabilization();
    let lo = MARGIN;
    let hi = SIZE - MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{:.2}" y="24" font-size="14" text-anchor="middle">{}</text>"#, SIZE / 2.0, escape(title));
    let _ = writeln!(svg, r#"<line x1="{lo:.2}" y1="{hi:.2}" x2="{hi:.2}" y2="{hi:.2}" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<line x1="{lo:.2}" y1="{hi:.2}" x2="{lo:.2}" y2="{lo:.2}" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<line x1="{lo:.2}" y1="{hi:.2}" x2="{hi:.2}" y2="{lo:.2}" stroke="gray"/>"#);
    let _ = writeln!(
        svg,
        r#"<line x1="{lo:.2}" y1="{lo:.2}" x2="{hi:.2}" y2="{lo:.2}" stroke="gray" stroke-dasharray="4 4"/>"#
    );
    for k in 0..=t {
        let (x, y) = mark_position(t, k, ExtNat::Fin(k));
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{:.2}" font-size="10" text-anchor="middle">{k}</text>"#, hi + 14.0);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{y:.2}" font-size="10" text-anchor="end">{k}</text>"#, lo - 6.0);
    }
    let _ = writeln!(svg, r#"<text x="{:.2}" y="{lo:.2}" font-size="10" text-anchor="end">inf</text>"#, lo - 6.0);

    let mut counts: BTreeMap<(usize, ExtNat), usize> = BTreeMap::new();
    for iv in barcode.intervals() {
        *counts.entry((iv.birth, iv.death)).or_insert(0) += 1;
    }
    for ((b, d), m) in counts {
        let (x, y) = mark_position(t, b, d);
        let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="steelblue"/>"#);
        if m > 1 {
            let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" font-size="10">×{m}</text>"#, x + 6.0, y - 6.0);
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

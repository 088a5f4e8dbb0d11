//! Spy plots in the style of Matlab's `spy`: one mark per structural
//! nonzero and an `nz = <count>` caption.

use std::fmt::Write as _;
use std::path::Path;

use super::Pattern;
use crate::error::{Error, Result};

const PLOT: f64 = 560.0;
const MARGIN: f64 = 40.0;

pub fn spy_svg_string(pattern: &Pattern, title: &str) -> String {
    let n = pattern.dim.max(1) as f64;
    let cell = PLOT / n;
    // keep tiny matrices readable and large ones visible
    let mark = cell.max(0.6);
    let width = PLOT + 2.0 * MARGIN;
    let height = PLOT + 2.0 * MARGIN + 20.0;
    let mut s = String::with_capacity(64 * pattern.nnz() + 1024);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if !title.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            width / 2.0,
            MARGIN * 0.6,
            xml_escape(title)
        );
    }
    let _ = writeln!(s, r##"<g fill="#1f3a93">"##);
    for (i, j) in pattern.iter() {
        let _ = writeln!(
            s,
            r#"<rect class="nz" x="{:.3}" y="{:.3}" width="{mark:.3}" height="{mark:.3}"/>"#,
            MARGIN + j as f64 * cell,
            MARGIN + i as f64 * cell
        );
    }
    s.push_str("</g>\n");
    let _ = writeln!(
        s,
        r#"<rect class="frame" x="{MARGIN}" y="{MARGIN}" width="{PLOT}" height="{PLOT}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    // axis ticks at 0 and n
    for (pos, label) in [(0.0, "0".to_string()), (PLOT, pattern.dim.to_string())] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{label}</text>"#,
            MARGIN + pos,
            MARGIN - 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{label}</text>"#,
            MARGIN - 4.0,
            MARGIN + pos + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text class="caption" x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">nz = {}</text>"#,
        width / 2.0,
        MARGIN + PLOT + 24.0,
        pattern.nnz()
    );
    s.push_str("</svg>\n");
    s
}

pub fn spy_svg(pattern: &Pattern, title: &str, path: &Path) -> Result<()> {
    if pattern.dim == 0 {
        return Err(Error::invalid("cannot plot an empty matrix"));
    }
    std::fs::write(path, spy_svg_string(pattern, title)).map_err(|e| Error::io(path, e))
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

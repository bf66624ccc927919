//! SVG rendering of a tour: one marker per point, one line per tour edge,
//! crossing edges drawn in red. For illustration only.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::analysis::Crossing;
use crate::instance::{Instance, InstanceError, Tour};

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 20.0;

pub fn render_svg(inst: &Instance, tour: &Tour, crossings: &[Crossing]) -> Result<String, InstanceError> {
    let pts = inst.require_coords()?;
    for &p in tour.order() {
        inst.check_id(p)?;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let span = (x1 - x0).max(y1 - y0);
    let scale = if span > 0.0 { (CANVAS - 2.0 * MARGIN) / span } else { 1.0 };
    // flip y so the picture has the usual orientation
    let map = |x: f64, y: f64| (MARGIN + (x - x0) * scale, CANVAS - MARGIN - (y - y0) * scale);

    let hot: HashSet<usize> = crossings.iter().flat_map(|c| [c.first, c.second]).collect();
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(s, r#"<g class="tour" fill="none" stroke-width="1.5">"#).unwrap();
    for (k, e) in tour.edges().enumerate() {
        let (ax, ay) = map(pts[e.a].x, pts[e.a].y);
        let (bx, by) = map(pts[e.b].x, pts[e.b].y);
        let (class, color) = if hot.contains(&k) { ("edge crossing", "red") } else { ("edge", "black") };
        writeln!(
            s,
            r#"<line class="{class}" x1="{ax:.3}" y1="{ay:.3}" x2="{bx:.3}" y2="{by:.3}" stroke="{color}"/>"#
        )
        .unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, r#"<g class="points" fill="steelblue">"#).unwrap();
    for (i, p) in pts.iter().enumerate() {
        let (cx, cy) = map(p.x, p.y);
        writeln!(s, r#"<circle class="point" id="p{i}" cx="{cx:.3}" cy="{cy:.3}" r="3"/>"#).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, "</svg>").unwrap();
    Ok(s)
}

//! Slice plots: front contours and strategic paths in a plane.

use std::fmt::Write as _;
use std::path::Path;

use wildfront_core::{Plane, Polyline};

use crate::run::RunReport;
use crate::Error;

pub const SCHEMA: &str = "wildfront.slice/1";

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 20.0;

/// Contours of one front in a slice.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceContours {
    pub time: f64,
    pub contours: Vec<Polyline>,
}

/// Slices of every front of `report`; `EmptyIntersection` if none meets the plane.
pub fn slice_report(report: &RunReport, plane: &Plane) -> Result<Vec<SliceContours>, Error> {
    let out: Vec<SliceContours> = report
        .fronts
        .iter()
        .map(|w| SliceContours { time: w.time, contours: w.slice(plane) })
        .filter(|s| !s.contours.is_empty())
        .collect();
    if out.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    Ok(out)
}

fn color(i: usize, n: usize) -> String {
    let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
    let r = (255.0 * (0.95 - 0.15 * t)) as u8;
    let g = (255.0 * (0.75 - 0.6 * t)) as u8;
    let b = (255.0 * (0.2 - 0.15 * t)) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// SVG document for the slice of `report` by `plane`.
pub fn slice_svg(report: &RunReport, plane: &Plane) -> Result<(String, Vec<SliceContours>), Error> {
    let slices = slice_report(report, plane)?;
    let paths: Vec<Vec<[f64; 2]>> =
        report.strategies.iter().map(|s| s.path.iter().map(|&p| plane.to_2d(p)).collect()).collect();
    let all = slices.iter().flat_map(|s| s.contours.iter().flat_map(|c| c.points.iter().map(|&p| plane.to_2d(p))));
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for q in all.chain(paths.iter().flatten().copied()) {
        for k in 0..2 {
            lo[k] = lo[k].min(q[k]);
            hi[k] = hi[k].max(q[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let scale = (WIDTH - 2.0 * MARGIN) / span;
    let height = (hi[1] - lo[1]) * scale + 2.0 * MARGIN;
    let map = |q: [f64; 2]| (MARGIN + (q[0] - lo[0]) * scale, height - MARGIN - (q[1] - lo[1]) * scale);
    let pts = |it: &mut dyn Iterator<Item = [f64; 2]>| {
        let mut s = String::new();
        for q in it {
            let (x, y) = map(q);
            let _ = write!(s, "{x:.3},{y:.3} ");
        }
        s.trim_end().to_string()
    };

    let mut doc = String::new();
    let _ = writeln!(
        doc,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}" data-schema="{SCHEMA}">"#
    );
    let _ = writeln!(doc, "<metadata>{SCHEMA}; scenario {}</metadata>", escape(&report.scenario));
    let _ = writeln!(doc, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, s) in slices.iter().enumerate() {
        let stroke = color(i, slices.len());
        let _ = writeln!(doc, r#"<g data-time="{}" stroke="{stroke}" fill="none" stroke-width="1.5">"#, s.time);
        for c in &s.contours {
            let tag = if c.closed { "polygon" } else { "polyline" };
            let n = if c.closed && c.points.len() > 1 { c.points.len() - 1 } else { c.points.len() };
            let p = pts(&mut c.points[..n].iter().map(|&p| plane.to_2d(p)));
            let _ = writeln!(doc, r#"<{tag} points="{p}"/>"#);
        }
        let _ = writeln!(doc, "</g>");
    }
    for (i, path) in paths.iter().enumerate().filter(|(_, p)| p.len() > 1) {
        let p = pts(&mut path.iter().copied());
        let _ = writeln!(doc, r#"<polyline class="strategic-path" data-query="{i}" points="{p}" stroke="purple" fill="none" stroke-width="2"/>"#);
    }
    doc.push_str("</svg>\n");
    Ok((doc, slices))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes the slice of `report` by `plane` to `out` and returns the contours drawn.
pub fn render_slice(report: &RunReport, plane: &Plane, out: &Path) -> Result<Vec<SliceContours>, Error> {
    let (doc, slices) = slice_svg(report, plane)?;
    std::fs::write(out, doc).map_err(|e| Error::Io { path: out.to_path_buf(), source: e })?;
    Ok(slices)
}

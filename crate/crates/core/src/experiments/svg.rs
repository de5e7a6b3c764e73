//! Static SVG output for hulls, masks and convergence curves.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use super::CurveTable;
use crate::error::{Error, Result};
use crate::geom::BBox;
use crate::hull::RConvexHull;
use crate::raster::GridMask;

/// Longer side of the rendered image in pixels.
const CANVAS: f64 = 800.0;

pub enum SvgObject<'a> {
    Hull { hull: &'a RConvexHull, show_sample: bool },
    Mask(&'a GridMask),
    Curves(&'a CurveTable),
}

pub fn render_svg(object: &SvgObject, path: impl AsRef<Path>) -> Result<()> {
    let text = match object {
        SvgObject::Hull { hull, show_sample } => hull_svg(hull, *show_sample),
        SvgObject::Mask(m) => mask_svg(m),
        SvgObject::Curves(c) => curves_svg(c),
    };
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Opens an SVG whose inner group uses world coordinates with y up.
fn open_world(b: BBox) -> String {
    let (w, h) = (b.width().max(1e-12), b.height().max(1e-12));
    let scale = CANVAS / w.max(h);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="{} {} {} {}">"#,
        (w * scale).ceil(),
        (h * scale).ceil(),
        b.min.x,
        b.min.y,
        w,
        h
    );
    let _ = writeln!(s, r#"<rect x="{}" y="{}" width="{w}" height="{h}" fill="white"/>"#, b.min.x, b.min.y);
    let _ = writeln!(s, r#"<g transform="matrix(1 0 0 -1 0 {})">"#, b.min.y + b.max.y);
    s
}

fn close_world(mut s: String) -> String {
    s.push_str("</g>\n</svg>\n");
    s
}

/// Hull chains as filled paths of circular arcs (one `A` command per arc,
/// two for arcs longer than a half circle), isolated points as dots and,
/// optionally, the sample.
pub fn hull_svg(hull: &RConvexHull, show_sample: bool) -> String {
    let hb = hull.bounding_box();
    let pad = 0.05 * hb.diagonal().max(hull.r * 1e-3);
    let b = hb.expand(pad);
    let dot = 0.004 * b.width().max(b.height());
    let mut s = open_world(b);
    let mut d = String::new();
    for chain in &hull.boundary.chains {
        for (k, &ai) in chain.iter().enumerate() {
            let a = &hull.boundary.arcs[ai].arc;
            let p0 = a.start_point();
            if k == 0 {
                let _ = write!(d, "M {} {} ", p0.x, p0.y);
            }
            let pieces = if a.sweep.abs() > PI * (1.0 - 1e-9) { 2 } else { 1 };
            for q in 1..=pieces {
                let p = a.point_at(q as f64 / pieces as f64);
                let sweep_flag = u8::from(a.sweep > 0.0);
                let _ = write!(d, "A {r} {r} 0 0 {sweep_flag} {} {} ", p.x, p.y, r = a.radius);
            }
        }
        d.push_str("Z ");
    }
    if !d.is_empty() {
        let _ = writeln!(
            s,
            r##"<path d="{}" fill="#b0b0b0" fill-rule="nonzero" stroke="black" stroke-width="1" vector-effect="non-scaling-stroke"/>"##,
            d.trim_end()
        );
    }
    if show_sample {
        s.push_str(r##"<g fill="#404040">"##);
        s.push('\n');
        for p in hull.sample.iter() {
            let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="{}"/>"#, p.x, p.y, 0.35 * dot);
        }
        s.push_str("</g>\n");
    }
    s.push_str(r##"<g fill="#c00000">"##);
    s.push('\n');
    for &i in &hull.isolated {
        let p = hull.sample.get(i);
        let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="{dot}"/>"#, p.x, p.y);
    }
    s.push_str("</g>\n");
    close_world(s)
}

/// Occupied cells as rectangles, merged along rows.
pub fn mask_svg(mask: &GridMask) -> String {
    let g = mask.grid;
    let mut s = open_world(g.bbox());
    s.push_str(r#"<g fill="black" shape-rendering="crispEdges">"#);
    s.push('\n');
    for j in 0..g.height {
        let mut i = 0;
        while i < g.width {
            if !mask.get(i, j) {
                i += 1;
                continue;
            }
            let start = i;
            while i < g.width && mask.get(i, j) {
                i += 1;
            }
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{}" height="{}"/>"#,
                g.origin.x + start as f64 * g.h,
                g.origin.y + j as f64 * g.h,
                (i - start) as f64 * g.h,
                g.h
            );
        }
    }
    s.push_str("</g>\n");
    close_world(s)
}

/// Median distances against `n` on a log axis, one polyline per metric.
pub fn curves_svg(table: &CurveTable) -> String {
    let (w, h, m) = (CANVAS, 0.75 * CANVAS, 60.0);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let rows = &table.rows;
    let ns: Vec<f64> = rows.iter().map(|r| (r.n as f64).log10()).collect();
    let (x0, x1) = ns.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, &v| (a.0.min(v), a.1.max(v)));
    let (x0, x1) = if x1 > x0 { (x0, x1) } else { (x0 - 0.5, x0 + 0.5) };
    let ymax = rows
        .iter()
        .flat_map(|r| [r.median_d_h, r.median_d_h_boundary, r.median_d_mu])
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max)
        .max(1e-12)
        * 1.1;
    let px = |v: f64| m + (v - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |v: f64| h - m - v / ymax * (h - 2.0 * m);
    let _ = writeln!(
        s,
        r#"<path d="M {m} {m} L {m} {} L {} {}" fill="none" stroke="black"/>"#,
        h - m,
        w - m,
        h - m
    );
    for r in rows {
        let x = px((r.n as f64).log10());
        let _ = writeln!(s, r#"<text x="{x}" y="{}" font-size="12" text-anchor="middle">{}</text>"#, h - m + 18.0, r.n);
    }
    for k in 0..=4 {
        let v = ymax * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{v:.3e}</text>"#, m - 6.0, py(v) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">n ({}, log scale)</text>"#, w / 2.0, h - 12.0, table.shape);
    let series: [(&str, &str, fn(&super::CurveRow) -> f64); 3] = [
        ("d_H(S_n,S)", "#1f77b4", |r| r.median_d_h),
        ("d_H(bd S_n, bd S)", "#d62728", |r| r.median_d_h_boundary),
        ("d_mu(S_n,S)", "#2ca02c", |r| r.median_d_mu),
    ];
    let mut radii: Vec<f64> = rows.iter().map(|r| r.r).collect();
    radii.dedup();
    for (k, (label, color, f)) in series.iter().enumerate() {
        for &rad in &radii {
            let pts: Vec<String> = rows
                .iter()
                .filter(|r| r.r == rad)
                .map(|r| format!("{},{}", px((r.n as f64).log10()), py(f(r))))
                .collect();
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, pts.join(" "));
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{label}</text>"#,
            w - m - 150.0,
            m + 16.0 * k as f64
        );
    }
    s.push_str("</svg>\n");
    s
}

//! Reference supports: membership, uniform samplers, known lengths and areas.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{BBox, Point2, PointSet};
use crate::raster::Region;

/// Perimeter the catalan trisectrix loop is scaled to by default.
pub const TRISECTRIX_LENGTH: f64 = 20.7846;

/// Lowest acceptance rate tolerated by the rejection sampler.
pub const MIN_ACCEPTANCE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Disc,
    Annulus,
    Rectangle,
    Lens,
    Astroid,
    CatalanTrisectrix,
    TwoDiscs,
    Fig1a,
    Fig1b,
    Fig3Pinch,
}

impl Variant {
    pub const ALL: [Variant; 10] = [
        Variant::Disc,
        Variant::Annulus,
        Variant::Rectangle,
        Variant::Lens,
        Variant::Astroid,
        Variant::CatalanTrisectrix,
        Variant::TwoDiscs,
        Variant::Fig1a,
        Variant::Fig1b,
        Variant::Fig3Pinch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Disc => "disc",
            Variant::Annulus => "annulus",
            Variant::Rectangle => "rectangle",
            Variant::Lens => "lens",
            Variant::Astroid => "astroid",
            Variant::CatalanTrisectrix => "catalan_trisectrix",
            Variant::TwoDiscs => "two_discs",
            Variant::Fig1a => "fig1a",
            Variant::Fig1b => "fig1b",
            Variant::Fig3Pinch => "fig3_pinch",
        }
    }

    fn summary(self) -> &'static str {
        match self {
            Variant::Disc => "closed disc B(c, radius)",
            Variant::Annulus => "B(c, outer) minus the open disc B(c, inner)",
            Variant::Rectangle => "axis-aligned rectangle with half-widths hw, hh",
            Variant::Lens => "intersection of two discs of equal radius centered at (cx -+ offset, cy)",
            Variant::Astroid => "astroid |x/a|^(2/3) + |y/a|^(2/3) <= 1, perimeter 6a",
            Variant::CatalanTrisectrix => {
                "loop of x = a(1 - 3t^2), y = a t (3 - t^2), |t| <= sqrt 3; a calibrated so the perimeter equals `length`"
            }
            Variant::TwoDiscs => "two disjoint discs of radii r1, r2 centered at (-+sep/2, 0)",
            Variant::Fig1a => "r-convex set with zero reach: two notched blocks facing across a gap",
            Variant::Fig1b => "set with the outside r-rolling property that is not r-convex",
            Variant::Fig3Pinch => "rectangle minus an open disc touching its base; fails interior local connectivity",
        }
    }

    fn params(self) -> &'static [(&'static str, f64, &'static str)] {
        match self {
            Variant::Disc => &[("radius", 0.5, "disc radius"), ("cx", 0.0, "center x"), ("cy", 0.0, "center y")],
            Variant::Annulus => &[
                ("inner", 0.25, "hole radius"),
                ("outer", 0.5, "outer radius"),
                ("cx", 0.0, "center x"),
                ("cy", 0.0, "center y"),
            ],
            Variant::Rectangle => &[
                ("hw", 0.5, "half width"),
                ("hh", 0.5, "half height"),
                ("cx", 0.0, "center x"),
                ("cy", 0.0, "center y"),
            ],
            Variant::Lens => &[
                ("radius", 0.5, "radius of both discs"),
                ("offset", 0.25, "distance of each disc center from the lens center"),
                ("cx", 0.0, "center x"),
                ("cy", 0.0, "center y"),
            ],
            Variant::Astroid => &[("a", 1.0, "scale (cusp distance from the origin)")],
            Variant::CatalanTrisectrix => &[("length", TRISECTRIX_LENGTH, "target loop perimeter")],
            Variant::TwoDiscs => &[
                ("r1", 0.5, "left disc radius"),
                ("r2", 0.5, "right disc radius"),
                ("sep", 1.5, "distance between the centers"),
            ],
            Variant::Fig1a | Variant::Fig1b | Variant::Fig3Pinch => &[("r", 0.25, "rolling / hull radius the figure is built for")],
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown shape `{s}` (try `sample --list`)")))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Geometry {
    Disc { c: Point2, r: f64 },
    Annulus { c: Point2, inner: f64, outer: f64 },
    Rectangle { c: Point2, hw: f64, hh: f64 },
    Lens { c: Point2, r: f64, d: f64 },
    Astroid { a: f64 },
    Trisectrix { a: f64 },
    TwoDiscs { c1: Point2, r1: f64, c2: Point2, r2: f64 },
    Fig1a { notch: f64 },
    Fig1b { r: f64, half: f64, centers: [Point2; 3] },
    Fig3Pinch { big: f64 },
}

/// An analytic reference support.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeSpec {
    pub variant: Variant,
    /// Resolved parameters in catalog order, defaults filled in.
    pub params: Vec<(String, f64)>,
    pub bounding_box: BBox,
    geometry: Geometry,
}

/// Catalog entry for one variant.
#[derive(Clone, Debug)]
pub struct ShapeInfo {
    pub variant: Variant,
    pub summary: &'static str,
    pub params: Vec<ParamInfo>,
    pub analytic_length: bool,
}

#[derive(Clone, Debug)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: f64,
    pub doc: &'static str,
}

pub fn catalog() -> Vec<ShapeInfo> {
    Variant::ALL
        .into_iter()
        .map(|v| ShapeInfo {
            variant: v,
            summary: v.summary(),
            params: v
                .params()
                .iter()
                .map(|&(name, default, doc)| ParamInfo { name, default, doc })
                .collect(),
            analytic_length: !matches!(v, Variant::Fig1a | Variant::Fig1b | Variant::Fig3Pinch),
        })
        .collect()
}

/// Human-readable catalog, one block per shape.
pub fn catalog_text() -> String {
    let mut s = String::new();
    for info in catalog() {
        s.push_str(&format!("{}: {}\n", info.variant, info.summary));
        for p in &info.params {
            s.push_str(&format!("    {}={} ({})\n", p.name, p.default, p.doc));
        }
    }
    s
}

/// Parses `k=v,k=v`; an empty string gives no pairs.
pub fn parse_params(s: &str) -> Result<Vec<(String, f64)>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| Error::domain(format!("parameter `{t}` is not of the form k=v")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("parameter `{t}` has a non-numeric value")))?;
            if !v.is_finite() {
                return Err(Error::domain(format!("parameter `{t}` is not finite")));
            }
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(format!("shape parameter {name} must be > 0, got {v}")))
    }
}

impl ShapeSpec {
    /// Builds a shape from overrides of the catalog defaults.
    pub fn new(variant: Variant, overrides: &[(String, f64)]) -> Result<Self> {
        let table = variant.params();
        for (k, _) in overrides {
            if !table.iter().any(|p| p.0 == k) {
                let known: Vec<&str> = table.iter().map(|p| p.0).collect();
                return Err(Error::domain(format!(
                    "shape {variant} has no parameter `{k}` (known: {})",
                    known.join(", ")
                )));
            }
        }
        let params: Vec<(String, f64)> = table
            .iter()
            .map(|&(name, default, _)| {
                let v = overrides.iter().rev().find(|(k, _)| k == name).map_or(default, |p| p.1);
                (name.to_string(), v)
            })
            .collect();
        let get = |k: &str| params.iter().find(|p| p.0 == k).unwrap().1;
        let center = || Point2::new(get("cx"), get("cy"));
        let (geometry, bbox) = match variant {
            Variant::Disc => {
                let (c, r) = (center(), positive("radius", get("radius"))?);
                (Geometry::Disc { c, r }, square_box(c, r))
            }
            Variant::Annulus => {
                let (c, inner, outer) = (center(), positive("inner", get("inner"))?, positive("outer", get("outer"))?);
                if inner >= outer {
                    return Err(Error::domain(format!("annulus needs inner < outer, got {inner} >= {outer}")));
                }
                (Geometry::Annulus { c, inner, outer }, square_box(c, outer))
            }
            Variant::Rectangle => {
                let (c, hw, hh) = (center(), positive("hw", get("hw"))?, positive("hh", get("hh"))?);
                let b = bbox(c.x - hw, c.y - hh, c.x + hw, c.y + hh);
                (Geometry::Rectangle { c, hw, hh }, b)
            }
            Variant::Lens => {
                let (c, r) = (center(), positive("radius", get("radius"))?);
                let d = get("offset");
                if !(d >= 0.0 && d < r) {
                    return Err(Error::domain(format!("lens needs 0 <= offset < radius, got {d}")));
                }
                let half_h = (r * r - d * d).sqrt();
                let b = bbox(c.x - (r - d), c.y - half_h, c.x + (r - d), c.y + half_h);
                (Geometry::Lens { c, r, d }, b)
            }
            Variant::Astroid => {
                let a = positive("a", get("a"))?;
                (Geometry::Astroid { a }, bbox(-a, -a, a, a))
            }
            Variant::CatalanTrisectrix => {
                let a = positive("length", get("length"))? / trisectrix_unit_length();
                (Geometry::Trisectrix { a }, bbox(-8.0 * a, -2.0 * a, a, 2.0 * a))
            }
            Variant::TwoDiscs => {
                let (r1, r2, sep) = (positive("r1", get("r1"))?, positive("r2", get("r2"))?, get("sep"));
                if !(sep > r1 + r2) {
                    return Err(Error::domain(format!("two_discs needs sep > r1 + r2, got {sep}")));
                }
                let (c1, c2) = (Point2::new(-sep / 2.0, 0.0), Point2::new(sep / 2.0, 0.0));
                let b = square_box(c1, r1).union(&square_box(c2, r2));
                (Geometry::TwoDiscs { c1, r1, c2, r2 }, b)
            }
            Variant::Fig1a => {
                let notch = FIG1A_NOTCH * positive("r", get("r"))?;
                let x = notch / 2.0 + 3.0 * notch;
                (Geometry::Fig1a { notch }, bbox(-x, -notch, x, notch))
            }
            Variant::Fig1b => {
                let r = positive("r", get("r"))?;
                let half = FIG1B_HALF * r;
                let rho = FIG1B_SIDE * r / 3f64.sqrt();
                let centers = [90.0f64, 210.0, 330.0].map(|deg| Point2::from_polar(rho, deg.to_radians()));
                (Geometry::Fig1b { r, half, centers }, bbox(-half, -half, half, half))
            }
            Variant::Fig3Pinch => {
                let big = FIG3_RADIUS * positive("r", get("r"))?;
                (Geometry::Fig3Pinch { big }, bbox(-big, 0.0, big, big))
            }
        };
        Ok(ShapeSpec {
            variant,
            params,
            bounding_box: bbox,
            geometry,
        })
    }

    /// Builds a shape from a name and a `k=v,...` parameter string.
    pub fn parse(name: &str, params: &str) -> Result<Self> {
        ShapeSpec::new(name.parse()?, &parse_params(params)?)
    }

    pub fn with_defaults(variant: Variant) -> Self {
        ShapeSpec::new(variant, &[]).expect("catalog defaults are valid")
    }

    pub fn name(&self) -> &'static str {
        self.variant.name()
    }

    pub fn param(&self, k: &str) -> Option<f64> {
        self.params.iter().find(|p| p.0 == k).map(|p| p.1)
    }

    /// Derived constants worth recording next to results, such as the
    /// calibrated trisectrix scale.
    pub fn provenance(&self) -> Vec<(String, f64)> {
        match self.geometry {
            Geometry::Trisectrix { a } => vec![("a".into(), a)],
            Geometry::Fig1a { notch } => vec![("notch_radius".into(), notch)],
            Geometry::Fig1b { half, .. } => vec![("half_side".into(), half), ("disc_side".into(), FIG1B_SIDE)],
            Geometry::Fig3Pinch { big } => vec![("disc_radius".into(), big)],
            _ => Vec::new(),
        }
    }

    pub fn contains(&self, p: Point2) -> bool {
        match self.geometry {
            Geometry::Disc { c, r } => p.dist2(c) <= r * r,
            Geometry::Annulus { c, inner, outer } => {
                let d = p.dist2(c);
                d <= outer * outer && d >= inner * inner
            }
            Geometry::Rectangle { c, hw, hh } => (p.x - c.x).abs() <= hw && (p.y - c.y).abs() <= hh,
            Geometry::Lens { c, r, d } => {
                let (l, rt) = (Point2::new(c.x - d, c.y), Point2::new(c.x + d, c.y));
                p.dist2(l) <= r * r && p.dist2(rt) <= r * r
            }
            Geometry::Astroid { a } => (p.x / a).abs().powf(2.0 / 3.0) + (p.y / a).abs().powf(2.0 / 3.0) <= 1.0,
            Geometry::Trisectrix { a } => {
                // Loop of 27 a y^2 = (a - x)(8a + x)^2.
                p.x >= -8.0 * a && p.x <= a && 27.0 * a * p.y * p.y <= (a - p.x) * (8.0 * a + p.x).powi(2)
            }
            Geometry::TwoDiscs { c1, r1, c2, r2 } => p.dist2(c1) <= r1 * r1 || p.dist2(c2) <= r2 * r2,
            Geometry::Fig1a { notch } => {
                let g = notch / 2.0;
                let ax = p.x.abs();
                if p.y.abs() > notch || ax < g || ax > g + 3.0 * notch {
                    return false;
                }
                // Notch centered on the inner edge of each block.
                Point2::new(ax, p.y).dist2(Point2::new(g, 0.0)) >= notch * notch
            }
            Geometry::Fig1b { r, half, centers } => {
                if p.x.abs() > half || p.y.abs() > half {
                    return false;
                }
                let in_disc = centers.iter().any(|&c| p.dist2(c) < r * r);
                !(in_disc || strictly_inside_triangle(p, &centers))
            }
            Geometry::Fig3Pinch { big } => {
                p.x.abs() <= big && p.y >= 0.0 && p.y <= big && p.dist2(Point2::new(0.0, big)) >= big * big
            }
        }
    }

    pub fn analytic_length(&self) -> Option<f64> {
        match self.geometry {
            Geometry::Disc { r, .. } => Some(2.0 * PI * r),
            Geometry::Annulus { inner, outer, .. } => Some(2.0 * PI * (inner + outer)),
            Geometry::Rectangle { hw, hh, .. } => Some(4.0 * (hw + hh)),
            Geometry::Lens { r, d, .. } => Some(4.0 * r * (d / r).acos()),
            Geometry::Astroid { a } => Some(6.0 * a),
            Geometry::Trisectrix { a } => Some(a * trisectrix_unit_length()),
            Geometry::TwoDiscs { r1, r2, .. } => Some(2.0 * PI * (r1 + r2)),
            Geometry::Fig1a { .. } | Geometry::Fig1b { .. } | Geometry::Fig3Pinch { .. } => None,
        }
    }

    pub fn analytic_area(&self) -> Option<f64> {
        match self.geometry {
            Geometry::Disc { r, .. } => Some(PI * r * r),
            Geometry::Annulus { inner, outer, .. } => Some(PI * (outer * outer - inner * inner)),
            Geometry::Rectangle { hw, hh, .. } => Some(4.0 * hw * hh),
            Geometry::Lens { r, d, .. } => Some(2.0 * r * r * (d / r).acos() - 2.0 * d * (r * r - d * d).sqrt()),
            Geometry::Astroid { a } => Some(3.0 * PI * a * a / 8.0),
            Geometry::Trisectrix { a } => Some(72.0 * 3f64.sqrt() / 5.0 * a * a),
            Geometry::TwoDiscs { r1, r2, .. } => Some(PI * (r1 * r1 + r2 * r2)),
            Geometry::Fig1a { notch } => Some(2.0 * (6.0 * notch * notch - PI * notch * notch / 2.0)),
            Geometry::Fig1b { .. } => None,
            Geometry::Fig3Pinch { big } => Some(2.0 * big * big - PI * big * big / 2.0),
        }
    }
}

impl Region for ShapeSpec {
    fn contains(&self, p: Point2) -> bool {
        ShapeSpec::contains(self, p)
    }

    fn bounding_box(&self) -> BBox {
        self.bounding_box
    }
}

/// Notch radius of fig1a in units of r.
const FIG1A_NOTCH: f64 = 1.25;
/// Half side of the fig1b square in units of r.
const FIG1B_HALF: f64 = 3.5;
/// Side of the fig1b disc-center triangle in units of r.
const FIG1B_SIDE: f64 = 1.9;
/// Radius of the fig3 disc in units of r.
const FIG3_RADIUS: f64 = 2.0;

/// Figure shapes built for hull radius `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigShape {
    Fig1a,
    Fig1b,
    Fig3Pinch,
}

pub fn make_fig_shape(which: FigShape, r: f64) -> Result<ShapeSpec> {
    let v = match which {
        FigShape::Fig1a => Variant::Fig1a,
        FigShape::Fig1b => Variant::Fig1b,
        FigShape::Fig3Pinch => Variant::Fig3Pinch,
    };
    ShapeSpec::new(v, &[("r".into(), r)])
}

fn bbox(x0: f64, y0: f64, x1: f64, y1: f64) -> BBox {
    BBox {
        min: Point2::new(x0, y0),
        max: Point2::new(x1, y1),
    }
}

fn square_box(c: Point2, r: f64) -> BBox {
    bbox(c.x - r, c.y - r, c.x + r, c.y + r)
}

fn strictly_inside_triangle(p: Point2, t: &[Point2; 3]) -> bool {
    let side = |a: Point2, b: Point2| (b - a).cross(p - a);
    let s = [side(t[0], t[1]), side(t[1], t[2]), side(t[2], t[0])];
    s.iter().all(|&v| v > 0.0) || s.iter().all(|&v| v < 0.0)
}

/// Perimeter of the unit (a = 1) trisectrix loop by composite Simpson
/// quadrature of the speed `sqrt(36 t^2 + 9 (1 - t^2)^2)`.
pub fn trisectrix_unit_length() -> f64 {
    let t0 = 3f64.sqrt();
    let n = 1 << 16;
    let step = 2.0 * t0 / n as f64;
    let speed = |t: f64| (36.0 * t * t + 9.0 * (1.0 - t * t).powi(2)).sqrt();
    let mut acc = speed(-t0) + speed(t0);
    for k in 1..n {
        let t = -t0 + k as f64 * step;
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * speed(t);
    }
    acc * step / 3.0
}

/// Polygon through `segments` equally spaced parameter values of the
/// trisectrix loop, counter-clockwise.
pub fn trisectrix_polygon(a: f64, segments: usize) -> Vec<Point2> {
    let t0 = 3f64.sqrt();
    (0..segments)
        .map(|k| {
            let t = t0 - 2.0 * t0 * k as f64 / segments as f64;
            Point2::new(a * (1.0 - 3.0 * t * t), a * t * (3.0 - t * t))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleRequest {
    pub shape: ShapeSpec,
    pub n: usize,
    pub seed: u64,
}

/// `n` independent uniform points on the shape by rejection from its
/// bounding box, deterministic in `seed`.
pub fn sample_uniform(req: &SampleRequest) -> Result<PointSet> {
    PointSet::new(sample_points(req)?)
}

/// Same draws as [`sample_uniform`] without deduplication.
pub fn sample_points(req: &SampleRequest) -> Result<Vec<Point2>> {
    if req.n == 0 {
        return Err(Error::domain("sample size must be >= 1"));
    }
    let b = req.shape.bounding_box;
    if !(b.width() > 0.0 && b.height() > 0.0) {
        return Err(Error::domain("shape has a degenerate bounding box"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let mut pts = Vec::with_capacity(req.n);
    let mut tries: u64 = 0;
    while pts.len() < req.n {
        tries += 1;
        let p = Point2::new(
            b.min.x + b.width() * rng.gen::<f64>(),
            b.min.y + b.height() * rng.gen::<f64>(),
        );
        if req.shape.contains(p) {
            pts.push(p);
        }
        if tries >= 10_000 && (pts.len() as f64) < MIN_ACCEPTANCE * tries as f64 {
            return Err(Error::domain(format!(
                "rejection sampler accepted {} of {tries} draws for {}; bounding box is misconfigured",
                pts.len(),
                req.shape.name()
            )));
        }
    }
    log::debug!(
        "sampled {} points on {} with {tries} draws (acceptance {:.4})",
        req.n,
        req.shape.name(),
        req.n as f64 / tries as f64
    );
    Ok(pts)
}

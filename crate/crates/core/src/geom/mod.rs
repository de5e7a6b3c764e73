//! Planar primitives: points, point sets, discs, circular arcs, distances to
//! finite sets and the Delaunay triangulation used by the hull builder.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod delaunay;
mod index;

pub use delaunay::{delaunay, Edge, Triangulation};
pub use index::PointIndex;

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Like [`Point2::new`] but rejects NaN and infinite coordinates.
    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Point2 { x, y })
        } else {
            Err(Error::domain(format!("non-finite point ({x}, {y})")))
        }
    }

    pub fn from_polar(radius: f64, angle: f64) -> Self {
        Point2::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn dist2(self, o: Point2) -> f64 {
        (self - o).norm2()
    }

    /// Counterclockwise perpendicular.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn unit(self) -> Point2 {
        let n = self.norm();
        Point2::new(self.x / n, self.y / n)
    }

    pub fn midpoint(self, o: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min: Point2,
    pub max: Point2,
}

impl BBox {
    pub fn new(min: Point2, max: Point2) -> Self {
        BBox { min, max }
    }

    pub fn of_points(points: &[Point2]) -> Option<BBox> {
        let first = *points.first()?;
        let mut b = BBox::new(first, first);
        for p in &points[1..] {
            b.min.x = b.min.x.min(p.x);
            b.min.y = b.min.y.min(p.y);
            b.max.x = b.max.x.max(p.x);
            b.max.y = b.max.y.max(p.y);
        }
        Some(b)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Point2 {
        self.min.midpoint(self.max)
    }

    pub fn expand(&self, by: f64) -> BBox {
        BBox::new(
            Point2::new(self.min.x - by, self.min.y - by),
            Point2::new(self.max.x + by, self.max.y + by),
        )
    }

    pub fn union(&self, o: &BBox) -> BBox {
        BBox::new(
            Point2::new(self.min.x.min(o.min.x), self.min.y.min(o.min.y)),
            Point2::new(self.max.x.max(o.max.x), self.max.y.max(o.max.y)),
        )
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Largest amount by which `inner` sticks out of `self` on any side
    /// (zero or negative when `inner` fits).
    pub fn overhang(&self, inner: &BBox) -> f64 {
        [
            self.min.x - inner.min.x,
            self.min.y - inner.min.y,
            inner.max.x - self.max.x,
            inner.max.y - self.max.y,
        ]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A finite planar sample with near-duplicates merged.
///
/// Points closer than `dedupe_tolerance` to an earlier point are dropped, so
/// stored points are pairwise farther apart than the tolerance. The default
/// tolerance is `1e-12` times the bounding-box diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    points: Vec<Point2>,
    dedupe_tolerance: f64,
}

impl PointSet {
    pub const RELATIVE_DEDUPE_TOLERANCE: f64 = 1e-12;

    pub fn new(points: Vec<Point2>) -> Result<Self> {
        let tol = BBox::of_points(&points)
            .map(|b| b.diagonal() * Self::RELATIVE_DEDUPE_TOLERANCE)
            .unwrap_or(0.0);
        Self::with_tolerance(points, tol)
    }

    pub fn with_tolerance(points: Vec<Point2>, dedupe_tolerance: f64) -> Result<Self> {
        if !(dedupe_tolerance >= 0.0) || !dedupe_tolerance.is_finite() {
            return Err(Error::domain(format!(
                "dedupe tolerance must be finite and >= 0, got {dedupe_tolerance}"
            )));
        }
        if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| !p.is_finite()) {
            return Err(Error::domain(format!("point {i} is not finite: {p}")));
        }
        let points = dedupe(points, dedupe_tolerance);
        Ok(PointSet {
            points,
            dedupe_tolerance,
        })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, i: usize) -> Point2 {
        self.points[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = Point2> + '_ {
        self.points.iter().copied()
    }

    pub fn dedupe_tolerance(&self) -> f64 {
        self.dedupe_tolerance
    }

    pub fn bbox(&self) -> Option<BBox> {
        BBox::of_points(&self.points)
    }

    pub fn diameter(&self) -> f64 {
        let mut d2: f64 = 0.0;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                d2 = d2.max(p.dist2(*q));
            }
        }
        d2.sqrt()
    }

    /// Concatenation of two sets, re-deduplicated.
    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        let mut pts = self.points.clone();
        pts.extend_from_slice(&other.points);
        PointSet::with_tolerance(pts, self.dedupe_tolerance.max(other.dedupe_tolerance))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<PointSet> {
        PointSet::new(read_points_csv(path)?)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_points_csv(path, &self.points)
    }
}

fn dedupe(points: Vec<Point2>, tol: f64) -> Vec<Point2> {
    if tol == 0.0 {
        let mut seen = std::collections::HashSet::new();
        return points
            .into_iter()
            .filter(|p| seen.insert((p.x.to_bits(), p.y.to_bits())))
            .collect();
    }
    let cell = |v: f64| (v / tol).floor() as i64;
    let mut grid: HashMap<(i64, i64), Vec<Point2>> = HashMap::new();
    let mut kept = Vec::with_capacity(points.len());
    'outer: for p in points {
        let (cx, cy) = (cell(p.x), cell(p.y));
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = grid.get(&(cx + dx, cy + dy)) {
                    if bucket.iter().any(|q| q.dist(p) <= tol) {
                        continue 'outer;
                    }
                }
            }
        }
        grid.entry((cx, cy)).or_default().push(p);
        kept.push(p);
    }
    kept
}

/// Closed disc `B(center, radius)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disc {
    pub center: Point2,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: Point2, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
            return Err(Error::domain(format!(
                "disc needs a finite center and radius > 0, got {center} / {radius}"
            )));
        }
        Ok(Disc { center, radius })
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.center.dist2(p) <= self.radius * self.radius
    }

    pub fn contains_open(&self, p: Point2) -> bool {
        self.center.dist2(p) < self.radius * self.radius
    }
}

/// Maps an angle into `(-pi, pi]`.
pub fn normalize_angle(a: f64) -> f64 {
    let mut t = a % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// A circular arc. `sweep` is signed, counterclockwise positive, and the arc
/// runs from `start_angle` to `start_angle + sweep`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcSegment {
    pub center: Point2,
    pub radius: f64,
    pub start_angle: f64,
    pub sweep: f64,
}

impl ArcSegment {
    pub fn new(center: Point2, radius: f64, start_angle: f64, sweep: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain(format!("arc radius must be > 0, got {radius}")));
        }
        if !(sweep.abs() <= 2.0 * PI) {
            return Err(Error::domain(format!("arc sweep must satisfy |sweep| <= 2pi, got {sweep}")));
        }
        if !center.is_finite() || !start_angle.is_finite() {
            return Err(Error::domain("arc center and start angle must be finite"));
        }
        Ok(ArcSegment {
            center,
            radius,
            start_angle: normalize_angle(start_angle),
            sweep,
        })
    }

    pub fn length(&self) -> f64 {
        arc_length(self)
    }

    pub fn end_angle(&self) -> f64 {
        self.start_angle + self.sweep
    }

    pub fn point_at_angle(&self, angle: f64) -> Point2 {
        self.center + Point2::from_polar(self.radius, angle)
    }

    /// Point at parameter `t` in `[0, 1]` along the arc.
    pub fn point_at(&self, t: f64) -> Point2 {
        self.point_at_angle(self.start_angle + t * self.sweep)
    }

    pub fn start_point(&self) -> Point2 {
        self.point_at_angle(self.start_angle)
    }

    pub fn end_point(&self) -> Point2 {
        self.point_at_angle(self.end_angle())
    }

    /// Unit tangent in the direction of travel at angle `a`.
    pub fn tangent_at_angle(&self, a: f64) -> Point2 {
        let t = Point2::new(-a.sin(), a.cos());
        if self.sweep >= 0.0 {
            t
        } else {
            -t
        }
    }

    /// The arc's angular span as a counterclockwise interval `[lo, hi]` with
    /// `lo` in `(-pi, pi]`... shifted so that `hi >= lo`.
    pub fn ccw_interval(&self) -> (f64, f64) {
        if self.sweep >= 0.0 {
            (self.start_angle, self.start_angle + self.sweep)
        } else {
            (self.start_angle + self.sweep, self.start_angle)
        }
    }

    /// Whether the ray from the center at angle `a` meets the arc.
    pub fn spans_angle(&self, a: f64) -> bool {
        let (lo, _) = self.ccw_interval();
        let off = (a - lo).rem_euclid(2.0 * PI);
        off <= self.sweep.abs()
    }

    /// Euclidean distance from `p` to the arc.
    pub fn distance_to(&self, p: Point2) -> f64 {
        let v = p - self.center;
        if v.norm() > 0.0 && self.spans_angle(v.angle()) {
            (v.norm() - self.radius).abs()
        } else {
            p.dist(self.start_point()).min(p.dist(self.end_point()))
        }
    }
}

/// Length `radius * |sweep|` of an arc.
pub fn arc_length(a: &ArcSegment) -> f64 {
    a.radius * a.sweep.abs()
}

fn require_nonempty(a: &PointSet) -> Result<()> {
    if a.is_empty() {
        Err(Error::domain("point set is empty"))
    } else {
        Ok(())
    }
}

/// Distance from `x` to the nearest point of `a`.
pub fn dist_to_set(x: Point2, a: &PointSet) -> Result<f64> {
    require_nonempty(a)?;
    Ok(a.iter().map(|p| p.dist2(x)).fold(f64::INFINITY, f64::min).sqrt())
}

/// A nearest point of `a` to `x`, and whether it is the only point attaining
/// the minimum distance up to `tie_tolerance`.
pub fn nearest_point(x: Point2, a: &PointSet, tie_tolerance: f64) -> Result<(Point2, bool)> {
    require_nonempty(a)?;
    if !(tie_tolerance >= 0.0) {
        return Err(Error::domain(format!("tie tolerance must be >= 0, got {tie_tolerance}")));
    }
    let mut best = (a.get(0), f64::INFINITY);
    for p in a.iter() {
        let d = p.dist(x);
        if d < best.1 {
            best = (p, d);
        }
    }
    let ties = a.iter().filter(|p| p.dist(x) <= best.1 + tie_tolerance).count();
    Ok((best.0, ties == 1))
}

/// Hausdorff distance between two finite sets.
pub fn hausdorff_pointsets(a: &PointSet, b: &PointSet) -> Result<f64> {
    require_nonempty(a)?;
    require_nonempty(b)?;
    let ia = PointIndex::new(a.points());
    let ib = PointIndex::new(b.points());
    let directed = |from: &PointSet, to: &PointIndex| {
        from.iter()
            .map(|p| to.nearest(p).map(|(_, d)| d).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    };
    Ok(directed(a, &ib).max(directed(b, &ia)))
}

/// Reads a `x,y` CSV file. Rows with missing or non-finite fields are errors.
pub fn read_points_csv(path: impl AsRef<Path>) -> Result<Vec<Point2>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_points_from(file, &path.display().to_string())
}

pub(crate) fn read_points_from<R: std::io::Read>(reader: R, label: &str) -> Result<Vec<Point2>> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: label.to_string(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(parse_err(1, format!("expected header `x,y`, found `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let line = row + 2;
        let rec = rec.map_err(|e| parse_err(line, e.to_string()))?;
        if rec.len() != 2 {
            return Err(parse_err(line, format!("expected 2 fields, found {}", rec.len())));
        }
        let field = |k: usize| -> Result<f64> {
            let s = &rec[k];
            let v: f64 = s
                .parse()
                .map_err(|_| parse_err(line, format!("cannot parse `{s}` as a number")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(parse_err(line, format!("non-finite value `{s}`")))
            }
        };
        out.push(Point2::new(field(0)?, field(1)?));
    }
    Ok(out)
}

pub fn write_points_csv(path: impl AsRef<Path>, points: &[Point2]) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::with_capacity(points.len() * 40 + 4);
    text.push_str("x,y\n");
    for p in points {
        text.push_str(&format!("{},{}\n", p.x, p.y));
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

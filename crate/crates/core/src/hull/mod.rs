//! The r-convex hull of a planar sample.
//!
//! `S_n` is the intersection of the complements of all open radius-`r` discs
//! that contain no sample point. With `E = {y : dist(y, sample) >= r}` the set
//! of admissible disc centers, the complement of `S_n` is `E + B(0, r)` (open
//! ball), and the boundary of `S_n` is made of radius-`r` arcs centered at the
//! corners of `E`. Those corners are exactly the points of Delaunay pairs'
//! Voronoi edges at distance `r` from the pair.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::geom::{delaunay, ArcSegment, BBox, Point2, PointIndex, PointSet};

mod oracle;

pub use oracle::{hull_membership_oracle, MembershipOracle};

/// Relative slack used when accepting a candidate center.
pub const CENTER_TOLERANCE: f64 = 1e-9;
/// Relative distance under which two chain nodes are treated as one.
pub const MERGE_TOLERANCE: f64 = 1e-9;
const PREDICATE_TOLERANCE: f64 = 1e-11;
const ENDPOINT_ANGLE_EPS: f64 = 1e-9;

/// An admissible empty-disc center on the Voronoi edge of `contacts`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmptyDisc {
    pub center: Point2,
    pub contacts: (usize, usize),
    /// Unit direction along the Voronoi edge in which the distance to the
    /// pair grows.
    pub outward: Point2,
}

/// How a boundary arc ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ArcEnd {
    /// At a sample point.
    Sample(usize),
    /// Where the arc meets the circle about another empty-disc center.
    Crossing(Point2),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryArc {
    /// Clockwise arc (negative sweep): the hull lies on its left.
    pub arc: ArcSegment,
    /// Index into [`RConvexHull::centers`].
    pub disc: usize,
    /// Sample indices of the disc's two contact points.
    pub contacts: (usize, usize),
    pub ends: [ArcEnd; 2],
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct HullBoundary {
    pub arcs: Vec<BoundaryArc>,
    /// Closed chains as cyclic sequences of arc indices. Outer chains run
    /// counterclockwise, hole chains clockwise.
    pub chains: Vec<Vec<usize>>,
    /// Connected component of each chain.
    pub component_ids: Vec<usize>,
    /// Signed area enclosed by each chain.
    pub chain_areas: Vec<f64>,
}

impl HullBoundary {
    pub fn length(&self) -> f64 {
        self.arcs.iter().map(|a| a.arc.length()).sum()
    }

    pub fn component_count(&self) -> usize {
        self.component_ids.iter().map(|&c| c + 1).max().unwrap_or(0)
    }
}

/// Angular intervals of the circle `|y - X_i| = r` that belong to `E`.
#[derive(Clone, Debug)]
enum CircleCover {
    Full,
    Empty,
    Split { angles: Vec<f64>, in_e: Vec<bool> },
}

impl CircleCover {
    fn contains_angle(&self, a: f64) -> bool {
        match self {
            CircleCover::Full => true,
            CircleCover::Empty => false,
            CircleCover::Split { angles, in_e } => {
                let k = angles.partition_point(|&t| t <= a);
                if k == 0 {
                    in_e[angles.len() - 1]
                } else {
                    in_e[k - 1]
                }
            }
        }
    }

    fn any_e(&self) -> bool {
        match self {
            CircleCover::Full => true,
            CircleCover::Empty => false,
            CircleCover::Split { in_e, .. } => in_e.iter().any(|&b| b),
        }
    }
}

/// A y-monotone piece of a boundary arc, used for ray crossing counts.
#[derive(Clone, Copy, Debug)]
struct Piece {
    cx: f64,
    cy: f64,
    xsign: f64,
    ylo: f64,
    yhi: f64,
    dir: i32,
}

/// The r-convex hull `S_n` of a sample.
#[derive(Clone, Debug)]
pub struct RConvexHull {
    pub sample: PointSet,
    pub r: f64,
    pub boundary: HullBoundary,
    /// Sample points that form singleton components.
    pub isolated: Vec<usize>,
    /// Sample points lying on boundary chains.
    pub regular: Vec<usize>,
    /// All accepted empty-disc centers (corners of `E`).
    pub centers: Vec<EmptyDisc>,
    sample_index: PointIndex,
    center_index: PointIndex,
    covers: Vec<CircleCover>,
    active_index: PointIndex,
    active_ids: Vec<usize>,
    pieces: Vec<Piece>,
    bbox: BBox,
}

impl RConvexHull {
    /// Membership: sample points are always inside; elsewhere the winding
    /// number of the boundary chains decides.
    pub fn contains(&self, x: Point2) -> bool {
        if let Some((_, d)) = self.sample_index.nearest(x) {
            if d <= self.point_tolerance() {
                return true;
            }
        }
        if !self.bbox.contains(x) {
            return false;
        }
        self.winding(x) != 0
    }

    fn point_tolerance(&self) -> f64 {
        self.sample.dedupe_tolerance().max(1e-12 * self.r)
    }

    /// Winding number of the whole boundary around `x`.
    pub fn winding(&self, x: Point2) -> i32 {
        winding_of(self.pieces.iter(), self.r, x)
    }

    /// Whether `x` lies in some open radius-`r` disc that misses the sample,
    /// decided directly from `E` rather than from the stitched boundary.
    pub fn in_empty_disc(&self, x: Point2) -> bool {
        self.covered_with(x, PREDICATE_TOLERANCE)
    }

    fn covered_with(&self, x: Point2, rel_tol: f64) -> bool {
        let r = self.r;
        match self.sample_index.nearest(x) {
            None => return true,
            Some((_, d)) if d >= r => return true,
            Some((_, d)) if d <= self.point_tolerance() => return false,
            _ => {}
        }
        if self.center_index.any_within(x, r * (1.0 - rel_tol)) {
            return true;
        }
        // Nearest point of E on the smooth part of a sample's circle.
        let pts = self.sample.points();
        self.active_index.any_within_where(x, 2.0 * r, |k, d| {
            if d <= 0.0 {
                return false;
            }
            let s = self.active_ids[k];
            let a = (x - pts[s]).angle();
            self.covers[s].contains_angle(a)
        })
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary.length()
    }

    /// Lebesgue measure of the hull.
    pub fn area(&self) -> f64 {
        self.boundary.chain_areas.iter().sum()
    }

    pub fn isolated_points(&self) -> PointSet {
        let pts = self.isolated.iter().map(|&i| self.sample.get(i)).collect();
        PointSet::with_tolerance(pts, self.sample.dedupe_tolerance()).expect("subset of a valid set")
    }

    /// Bounding box of the sample, which contains the hull.
    pub fn bounding_box(&self) -> BBox {
        self.bbox
    }

    /// Euclidean distance from `x` to the boundary of the hull: the arcs,
    /// plus the isolated points.
    pub fn boundary_distance(&self, x: Point2) -> f64 {
        let arcs = self
            .boundary
            .arcs
            .iter()
            .map(|a| a.arc.distance_to(x))
            .fold(f64::INFINITY, f64::min);
        self.isolated
            .iter()
            .map(|&i| self.sample.get(i).dist(x))
            .fold(arcs, f64::min)
    }

    /// Boundary crossings of the horizontal line at height `y` as
    /// `(x, direction)` pairs sorted by `x`; a point on the line is inside
    /// iff the directions to its right sum to nonzero.
    pub fn row_crossings(&self, y: f64) -> Vec<(f64, i32)> {
        let r2 = self.r * self.r;
        let mut out: Vec<(f64, i32)> = self
            .pieces
            .iter()
            .filter(|p| p.ylo <= y && y < p.yhi)
            .map(|p| {
                let dy = y - p.cy;
                (p.cx + p.xsign * (r2 - dy * dy).max(0.0).sqrt(), p.dir)
            })
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        out
    }
}

fn winding_of<'a>(pieces: impl Iterator<Item = &'a Piece>, r: f64, x: Point2) -> i32 {
    let r2 = r * r;
    let mut w = 0;
    for p in pieces {
        if p.ylo <= x.y && x.y < p.yhi {
            let dy = x.y - p.cy;
            let xc = p.cx + p.xsign * (r2 - dy * dy).max(0.0).sqrt();
            if xc > x.x {
                w += p.dir;
            }
        }
    }
    w
}

fn split_pieces(a: &ArcSegment) -> Vec<Piece> {
    let (lo, hi) = a.ccw_interval();
    let mut cuts = vec![lo];
    let mut k = ((lo - FRAC_PI_2) / PI).floor() + 1.0;
    loop {
        let t = FRAC_PI_2 + k * PI;
        if t >= hi {
            break;
        }
        if t > lo {
            cuts.push(t);
        }
        k += 1.0;
    }
    cuts.push(hi);
    let cw = a.sweep < 0.0;
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (s0, s1) = (a.center.y + a.radius * w[0].sin(), a.center.y + a.radius * w[1].sin());
            let right = (0.5 * (w[0] + w[1])).cos() > 0.0;
            // Counterclockwise travel goes up on the right half.
            let up = right != cw;
            Piece {
                cx: a.center.x,
                cy: a.center.y,
                xsign: if right { 1.0 } else { -1.0 },
                ylo: s0.min(s1),
                yhi: s0.max(s1),
                dir: if up { 1 } else { -1 },
            }
        })
        .collect()
}

/// Signed area contribution `1/2 * integral(x dy - y dx)` of an arc.
pub fn arc_green_area(a: &ArcSegment) -> f64 {
    let (t1, t2) = (a.start_angle, a.start_angle + a.sweep);
    let r = a.radius;
    0.5 * (r * a.center.x * (t2.sin() - t1.sin()) - r * a.center.y * (t2.cos() - t1.cos()) + r * r * a.sweep)
}

/// The two intersection points of the radius-`r` circles about `a` and `b`.
fn circle_pair(a: Point2, b: Point2, r: f64) -> Option<[Point2; 2]> {
    let v = b - a;
    let d2 = v.norm2();
    let h2 = r * r - 0.25 * d2;
    if !(h2 > 0.0) || d2 == 0.0 {
        return None;
    }
    let m = a.midpoint(b);
    let off = v.perp() * (h2.sqrt() / d2.sqrt());
    Some([m + off, m - off])
}

/// Voronoi-edge interval `[lo, hi]` along the pair normal for one side.
fn side_bound(tri: &crate::geom::Triangulation, t: Option<usize>, opp: Option<usize>, m: Point2, n: Point2, a: Point2, b: Point2, r: f64) -> (f64, f64) {
    let (Some(t), Some(o)) = (t, opp) else {
        return (f64::NEG_INFINITY, f64::INFINITY);
    };
    let [i, j, k] = tri.triangles[t];
    let (pa, pb, pc) = (tri.vertices[i], tri.vertices[j], tri.vertices[k]);
    let d = 2.0 * (pa.x * (pb.y - pc.y) + pb.x * (pc.y - pa.y) + pc.x * (pa.y - pb.y));
    let ux = (pa.norm2() * (pb.y - pc.y) + pb.norm2() * (pc.y - pa.y) + pc.norm2() * (pa.y - pb.y)) / d;
    let uy = (pa.norm2() * (pc.x - pb.x) + pb.norm2() * (pa.x - pc.x) + pc.norm2() * (pb.x - pa.x)) / d;
    let tc = (Point2::new(ux, uy) - m).dot(n);
    if !tc.is_finite() || tc.abs() > 1e6 * r.max(a.dist(b)) {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    // The edge runs from the circumcenter away from the opposite vertex.
    if (b - a).cross(tri.vertices[o] - a) > 0.0 {
        (f64::NEG_INFINITY, tc)
    } else {
        (tc, f64::INFINITY)
    }
}

fn enumerate_centers(sample: &PointSet, index: &PointIndex, r: f64) -> Result<(Vec<EmptyDisc>, Vec<f64>)> {
    let n = sample.len();
    let mut nn = vec![f64::INFINITY; n];
    if n < 2 {
        return Ok((Vec::new(), nn));
    }
    let tri = delaunay(sample)?;
    let tol = CENTER_TOLERANCE * r;
    let slack = 1e-6 * r;
    let mut out = Vec::new();
    for e in &tri.edges {
        let (a, b) = (sample.get(e.a), sample.get(e.b));
        let len = a.dist(b);
        nn[e.a] = nn[e.a].min(len);
        nn[e.b] = nn[e.b].min(len);
        let h2 = r * r - 0.25 * len * len;
        if !(h2 > 0.0) {
            continue;
        }
        let h = h2.sqrt();
        let m = a.midpoint(b);
        let nrm = (b - a).perp() * (1.0 / len);
        let (lo0, hi0) = side_bound(&tri, e.triangles[0], e.opposite[0], m, nrm, a, b, r);
        let (lo1, hi1) = side_bound(&tri, e.triangles[1], e.opposite[1], m, nrm, a, b, r);
        let (lo, hi) = (lo0.max(lo1), hi0.min(hi1));
        for s in [1.0, -1.0] {
            let t = s * h;
            if t < lo - slack || t > hi + slack {
                continue;
            }
            let c = m + nrm * t;
            if index.any_within(c, r - tol) {
                continue;
            }
            out.push(EmptyDisc {
                center: c,
                contacts: (e.a, e.b),
                outward: nrm * s,
            });
        }
    }
    Ok((out, nn))
}

fn build_covers(sample: &PointSet, index: &PointIndex, centers: &[EmptyDisc], nn: &[f64], r: f64) -> Vec<CircleCover> {
    let n = sample.len();
    let mut angles: Vec<Vec<f64>> = vec![Vec::new(); n];
    for c in centers {
        for i in [c.contacts.0, c.contacts.1] {
            angles[i].push((c.center - sample.get(i)).angle());
        }
    }
    let probe = r * (1.0 - PREDICATE_TOLERANCE);
    angles
        .into_iter()
        .enumerate()
        .map(|(i, mut a)| {
            if a.is_empty() {
                return if nn[i] >= 2.0 * r { CircleCover::Full } else { CircleCover::Empty };
            }
            a.sort_by(f64::total_cmp);
            let p = sample.get(i);
            let in_e = (0..a.len())
                .map(|k| {
                    let (t0, t1) = if k + 1 < a.len() { (a[k], a[k + 1]) } else { (a[k], a[0] + 2.0 * PI) };
                    let y = p + Point2::from_polar(r, 0.5 * (t0 + t1));
                    t1 > t0 && !index.any_within_except(y, probe, |j| j == i)
                })
                .collect();
            CircleCover::Split { angles: a, in_e }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum NodeKey {
    Sample(usize),
    Cross(usize, usize, u8),
}

/// Builds the r-convex hull of `sample`.
pub fn build_hull(sample: &PointSet, r: f64) -> Result<RConvexHull> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("hull radius must be finite and > 0, got {r}")));
    }
    if sample.is_empty() {
        return Err(Error::domain("cannot build the hull of an empty sample"));
    }
    let pts = sample.points();
    let sample_index = PointIndex::new(pts);
    let (centers, nn) = enumerate_centers(sample, &sample_index, r)?;
    let center_pos: Vec<Point2> = centers.iter().map(|c| c.center).collect();
    let center_index = PointIndex::new(&center_pos);
    let covers = build_covers(sample, &sample_index, &centers, &nn, r);
    let active_ids: Vec<usize> = (0..pts.len()).filter(|&i| covers[i].any_e()).collect();
    let active_pts: Vec<Point2> = active_ids.iter().map(|&i| pts[i]).collect();
    let mut hull = RConvexHull {
        sample: sample.clone(),
        r,
        boundary: HullBoundary::default(),
        isolated: Vec::new(),
        regular: Vec::new(),
        centers,
        sample_index,
        center_index,
        covers,
        active_index: PointIndex::new(&active_pts),
        active_ids,
        pieces: Vec::new(),
        bbox: sample.bbox().expect("nonempty"),
    };

    let (arcs, keys) = exposed_arcs(&hull);
    let boundary = stitch(arcs, keys, r)?;
    hull.pieces = boundary.arcs.iter().flat_map(|a| split_pieces(&a.arc)).collect();
    hull.boundary = boundary;

    let mut on_arc = vec![false; pts.len()];
    for a in &hull.boundary.arcs {
        for e in a.ends {
            if let ArcEnd::Sample(i) = e {
                on_arc[i] = true;
            }
        }
    }
    hull.regular = (0..pts.len()).filter(|&i| on_arc[i]).collect();
    hull.isolated = (0..pts.len())
        .filter(|&i| !on_arc[i] && is_isolated(&hull, i))
        .collect();
    log::debug!(
        "hull r={r}: {} centers, {} arcs, {} chains, {} isolated",
        hull.centers.len(),
        hull.boundary.arcs.len(),
        hull.boundary.chains.len(),
        hull.isolated.len()
    );
    Ok(hull)
}

fn is_isolated(hull: &RConvexHull, i: usize) -> bool {
    match &hull.covers[i] {
        CircleCover::Full => true,
        CircleCover::Empty => false,
        CircleCover::Split { .. } => {
            let p = hull.sample.get(i);
            let delta = 1e-6 * hull.r;
            (0..16).all(|k| {
                let a = (k as f64 + 0.5) * PI / 8.0;
                hull.covered_with(p + Point2::from_polar(delta, a), PREDICATE_TOLERANCE)
            })
        }
    }
}

/// Sub-arcs of each center's exposed arc that are not covered by other
/// empty discs, with the node keys of their ends.
fn exposed_arcs(hull: &RConvexHull) -> (Vec<BoundaryArc>, Vec<[(NodeKey, Point2); 2]>) {
    let r = hull.r;
    let pts = hull.sample.points();
    let mut arcs = Vec::new();
    let mut keys = Vec::new();
    for (ci, disc) in hull.centers.iter().enumerate() {
        let c = disc.center;
        let (p, q) = disc.contacts;
        let chord = pts[p].dist(pts[q]);
        let phi = (chord / (2.0 * r)).min(1.0).asin();
        let mid = (-disc.outward).angle();
        let start = mid + phi;
        let span = 2.0 * phi;
        let start_pt = c + Point2::from_polar(r, start);
        let (s0, s1) = if start_pt.dist2(pts[p]) <= start_pt.dist2(pts[q]) { (p, q) } else { (q, p) };

        // Clockwise offsets from `start` where another empty circle crosses.
        let mut cuts: Vec<(f64, NodeKey, Point2)> = Vec::new();
        hull.center_index.for_each_within(c, 2.0 * r, |cj, _| {
            if cj == ci {
                return;
            }
            let (a, b) = if ci < cj { (ci, cj) } else { (cj, ci) };
            let Some(xs) = circle_pair(hull.centers[a].center, hull.centers[b].center, r) else {
                return;
            };
            for (k, x) in xs.into_iter().enumerate() {
                let u = (start - (x - c).angle()).rem_euclid(2.0 * PI);
                if u > ENDPOINT_ANGLE_EPS && u < span - ENDPOINT_ANGLE_EPS {
                    cuts.push((u, NodeKey::Cross(a, b, k as u8), x));
                }
            }
        });
        cuts.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut marks = Vec::with_capacity(cuts.len() + 2);
        marks.push((0.0, NodeKey::Sample(s0), pts[s0]));
        marks.extend(cuts);
        marks.push((span, NodeKey::Sample(s1), pts[s1]));

        let mut open: Option<usize> = None;
        for w in 0..marks.len() - 1 {
            let (u0, u1) = (marks[w].0, marks[w + 1].0);
            let x = c + Point2::from_polar(r, start - 0.5 * (u0 + u1));
            let exposed = u1 > u0 && !hull.covered_with(x, PREDICATE_TOLERANCE);
            if exposed {
                open.get_or_insert(w);
            }
            if let Some(first) = open {
                let closes = !exposed || w + 2 == marks.len();
                if closes {
                    let last = if exposed { w + 1 } else { w };
                    let (ua, ub) = (marks[first].0, marks[last].0);
                    let end = |m: &(f64, NodeKey, Point2)| match m.1 {
                        NodeKey::Sample(i) => ArcEnd::Sample(i),
                        NodeKey::Cross(..) => ArcEnd::Crossing(m.2),
                    };
                    arcs.push(BoundaryArc {
                        arc: ArcSegment {
                            center: c,
                            radius: r,
                            start_angle: crate::geom::normalize_angle(start - ua),
                            sweep: -(ub - ua),
                        },
                        disc: ci,
                        contacts: (p, q),
                        ends: [end(&marks[first]), end(&marks[last])],
                    });
                    keys.push([(marks[first].1, marks[first].2), (marks[last].1, marks[last].2)]);
                    open = None;
                }
            }
        }
    }
    (arcs, keys)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

fn stitch(arcs: Vec<BoundaryArc>, keys: Vec<[(NodeKey, Point2); 2]>, r: f64) -> Result<HullBoundary> {
    // Nodes by key, then merged by location.
    let mut node_of: HashMap<NodeKey, usize> = HashMap::new();
    let mut node_pos: Vec<Point2> = Vec::new();
    let mut ends = Vec::with_capacity(arcs.len());
    for k in &keys {
        let mut e = [0usize; 2];
        for s in 0..2 {
            let id = *node_of.entry(k[s].0).or_insert_with(|| {
                node_pos.push(k[s].1);
                node_pos.len() - 1
            });
            e[s] = id;
        }
        ends.push(e);
    }
    let tol = MERGE_TOLERANCE * r;
    let mut uf = UnionFind::new(node_pos.len());
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in node_pos.iter().enumerate() {
        let (bx, by) = ((p.x / tol).floor() as i64, (p.y / tol).floor() as i64);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(b) = buckets.get(&(bx + dx, by + dy)) {
                    for &j in b {
                        if node_pos[j].dist(*p) <= tol {
                            uf.union(i, j);
                        }
                    }
                }
            }
        }
        buckets.entry((bx, by)).or_default().push(i);
    }
    for e in &mut ends {
        e[0] = uf.find(e[0]);
        e[1] = uf.find(e[1]);
    }

    let nnodes = node_pos.len();
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); nnodes];
    for (a, e) in ends.iter().enumerate() {
        outgoing[e[0]].push(a);
    }
    let fail = |reason: String, frag: &[usize]| Error::ChainClosure {
        reason,
        fragment: frag.iter().map(|&a| arcs[a].arc).collect(),
    };
    // Clockwise tangent at angle t is (sin t, -cos t).
    let tangent = |t: f64| Point2::new(t.sin(), -t.cos());
    let mut next = vec![usize::MAX; arcs.len()];
    let mut taken = vec![false; arcs.len()];
    for a in 0..arcs.len() {
        let v = ends[a][1];
        let back = -tangent(arcs[a].arc.end_angle());
        let ref_angle = back.angle();
        let mut best: Option<(f64, usize)> = None;
        for &b in &outgoing[v] {
            let out_angle = tangent(arcs[b].arc.start_angle).angle();
            let rot = (ref_angle - out_angle).rem_euclid(2.0 * PI);
            if best.map_or(true, |(br, bb)| rot < br || (rot == br && b < bb)) {
                best = Some((rot, b));
            }
        }
        let Some((_, b)) = best else {
            return Err(fail(format!("arc {a} ends at a node with no outgoing arc"), &[a]));
        };
        if taken[b] {
            return Err(fail(format!("arc {b} continues two different arcs"), &[a, b]));
        }
        taken[b] = true;
        next[a] = b;
    }

    let mut chain_of = vec![usize::MAX; arcs.len()];
    let mut chains: Vec<Vec<usize>> = Vec::new();
    for s in 0..arcs.len() {
        if chain_of[s] != usize::MAX {
            continue;
        }
        let id = chains.len();
        let mut chain = Vec::new();
        let mut a = s;
        while chain_of[a] == usize::MAX {
            chain_of[a] = id;
            chain.push(a);
            a = next[a];
        }
        if a != s {
            return Err(fail("chain does not return to its first arc".into(), &chain));
        }
        chains.push(chain);
    }

    let chain_areas: Vec<f64> = chains
        .iter()
        .map(|c| c.iter().map(|&a| arc_green_area(&arcs[a].arc)).sum())
        .collect();
    let chain_pieces: Vec<Vec<Piece>> = chains
        .iter()
        .map(|c| c.iter().flat_map(|&a| split_pieces(&arcs[a].arc)).collect())
        .collect();

    // Outer chains sharing a node belong to one component; each hole joins
    // the smallest outer chain around it.
    let nch = chains.len();
    let mut uf = UnionFind::new(nch);
    let mut first_chain_at = vec![usize::MAX; nnodes];
    for (ci, c) in chains.iter().enumerate() {
        if chain_areas[ci] <= 0.0 {
            continue;
        }
        for &a in c {
            let v = ends[a][0];
            if first_chain_at[v] == usize::MAX {
                first_chain_at[v] = ci;
            } else {
                uf.union(first_chain_at[v], ci);
            }
        }
    }
    for hi in 0..nch {
        if chain_areas[hi] > 0.0 {
            continue;
        }
        let probe = arcs[chains[hi][0]].arc.point_at(0.5);
        let host = (0..nch)
            .filter(|&o| chain_areas[o] > 0.0 && winding_of(chain_pieces[o].iter(), r, probe) != 0)
            .min_by(|&a, &b| chain_areas[a].total_cmp(&chain_areas[b]));
        match host {
            Some(o) => uf.union(o, hi),
            None => {
                return Err(fail("hole chain lies in no outer chain".into(), &chains[hi]));
            }
        }
    }
    let mut label: HashMap<usize, usize> = HashMap::new();
    let component_ids = (0..nch)
        .map(|c| {
            let root = uf.find(c);
            let next_id = label.len();
            *label.entry(root).or_insert(next_id)
        })
        .collect();

    Ok(HullBoundary {
        arcs,
        chains,
        component_ids,
        chain_areas,
    })
}

/// Length `L(S_n)`: the total length of the boundary arcs.
pub fn boundary_length(hull: &RConvexHull) -> f64 {
    hull.boundary_length()
}

pub fn contains(hull: &RConvexHull, x: Point2) -> bool {
    hull.contains(x)
}

pub fn isolated_points(hull: &RConvexHull) -> PointSet {
    hull.isolated_points()
}

/// Header of the boundary-arc CSV written by [`write_arcs_csv`].
pub const ARCS_CSV_HEADER: &str = "chain_id,center_x,center_y,radius,start_angle,sweep,endpoint_i,endpoint_j";

/// Writes the boundary arcs chain by chain. `endpoint_i`, `endpoint_j` are the
/// sample indices of the supporting disc's contact points.
pub fn write_arcs_csv(hull: &RConvexHull, path: impl AsRef<std::path::Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = format!("{ARCS_CSV_HEADER}\n");
    for (c, chain) in hull.boundary.chains.iter().enumerate() {
        for &k in chain {
            let a = &hull.boundary.arcs[k];
            text.push_str(&format!(
                "{c},{},{},{},{},{},{},{}\n",
                a.arc.center.x, a.arc.center.y, a.arc.radius, a.arc.start_angle, a.arc.sweep, a.contacts.0, a.contacts.1
            ));
        }
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests;

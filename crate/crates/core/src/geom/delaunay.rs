use std::collections::HashMap;

use spade::{DelaunayTriangulation, HasPosition, Triangulation as _};

use super::{Point2, PointSet};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
struct Site {
    pos: spade::Point2<f64>,
    idx: usize,
}

impl HasPosition for Site {
    type Scalar = f64;
    fn position(&self) -> spade::Point2<f64> {
        self.pos
    }
}

/// Undirected Delaunay edge `a < b` with up to two incident triangles and
/// the vertex opposite to the edge in each of them.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub triangles: [Option<usize>; 2],
    pub opposite: [Option<usize>; 2],
}

/// Delaunay triangulation of a point set, indexed by the set's own point
/// indices. Triangles are counterclockwise.
#[derive(Clone, Debug)]
pub struct Triangulation {
    pub vertices: Vec<Point2>,
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<Edge>,
    lookup: HashMap<(usize, usize), usize>,
}

impl Triangulation {
    pub fn edge(&self, a: usize, b: usize) -> Option<&Edge> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.lookup.get(&key).map(|&k| &self.edges[k])
    }

    /// Neighbours of every vertex along Delaunay edges.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        adj
    }
}

/// Delaunay triangulation with robust orientation / in-circle predicates.
/// Collinear inputs give no triangles but still a path of edges.
pub fn delaunay(points: &PointSet) -> Result<Triangulation> {
    let sites: Vec<Site> = points
        .iter()
        .enumerate()
        .map(|(idx, p)| Site {
            pos: spade::Point2::new(p.x, p.y),
            idx,
        })
        .collect();
    let dt: DelaunayTriangulation<Site> = DelaunayTriangulation::bulk_load_stable(sites)
        .map_err(|e| Error::domain(format!("triangulation failed: {e:?}")))?;

    let mut face_ids = HashMap::new();
    let mut triangles = Vec::with_capacity(dt.num_inner_faces());
    for f in dt.inner_faces() {
        let [u, v, w] = f.vertices();
        face_ids.insert(f.fix().index(), triangles.len());
        triangles.push([u.data().idx, v.data().idx, w.data().idx]);
    }

    let mut edges = Vec::with_capacity(dt.num_undirected_edges());
    let mut lookup = HashMap::with_capacity(dt.num_undirected_edges());
    for ue in dt.undirected_edges() {
        let d = ue.as_directed();
        let (mut a, mut b) = (d.from().data().idx, d.to().data().idx);
        let side = |h: spade::handles::DirectedEdgeHandle<'_, Site, (), (), ()>| {
            let f = h.face();
            if f.is_outer() {
                (None, None)
            } else {
                (
                    face_ids.get(&f.fix().index()).copied(),
                    h.opposite_vertex().map(|v| v.data().idx),
                )
            }
        };
        let (t0, o0) = side(d);
        let (t1, o1) = side(d.rev());
        let (mut tris, mut opp) = ([t0, t1], [o0, o1]);
        if a > b {
            std::mem::swap(&mut a, &mut b);
            tris.swap(0, 1);
            opp.swap(0, 1);
        }
        lookup.insert((a, b), edges.len());
        edges.push(Edge {
            a,
            b,
            triangles: tris,
            opposite: opp,
        });
    }

    Ok(Triangulation {
        vertices: points.points().to_vec(),
        triangles,
        edges,
        lookup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn circumcircle(a: Point2, b: Point2, c: Point2) -> (Point2, f64) {
        let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
        let ux = (a.norm2() * (b.y - c.y) + b.norm2() * (c.y - a.y) + c.norm2() * (a.y - b.y)) / d;
        let uy = (a.norm2() * (c.x - b.x) + b.norm2() * (a.x - c.x) + c.norm2() * (b.x - a.x)) / d;
        let o = Point2::new(ux, uy);
        (o, o.dist(a))
    }

    #[test]
    fn empty_circumcircles() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &n in &[3usize, 10, 200] {
            let ps = PointSet::new(
                (0..n)
                    .map(|_| Point2::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)))
                    .collect(),
            )
            .unwrap();
            let t = delaunay(&ps).unwrap();
            // Euler: 2n - 2 - h triangles.
            assert!(!t.triangles.is_empty());
            for tri in &t.triangles {
                let [a, b, c] = tri.map(|k| ps.get(k));
                assert!((b - a).cross(c - a) > 0.0, "triangle not ccw");
                let (o, rad) = circumcircle(a, b, c);
                for (k, p) in ps.iter().enumerate() {
                    if tri.contains(&k) {
                        continue;
                    }
                    assert!(p.dist(o) >= rad * (1.0 - 1e-9), "point {k} inside circumcircle");
                }
            }
            let adj_count: usize = t.edges.iter().map(|e| e.triangles.iter().flatten().count()).sum();
            assert_eq!(adj_count, 3 * t.triangles.len());
        }
    }

    #[test]
    fn collinear_has_path_edges() {
        let ps = PointSet::new((0..5).map(|k| Point2::new(k as f64, 2.0 * k as f64)).collect()).unwrap();
        let t = delaunay(&ps).unwrap();
        assert!(t.triangles.is_empty());
        assert_eq!(t.edges.len(), 4);
        assert!(t.edge(1, 2).is_some());
        assert!(t.edge(0, 2).is_none());
    }

    #[test]
    fn opposite_vertices_of_a_square() {
        let ps = PointSet::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.1, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap();
        let t = delaunay(&ps).unwrap();
        assert_eq!(t.triangles.len(), 2);
        let e = t.edge(0, 1).unwrap();
        assert_eq!(e.triangles.iter().flatten().count(), 1);
        let interior: Vec<&Edge> = t.edges.iter().filter(|e| e.triangles.iter().all(|x| x.is_some())).collect();
        assert_eq!(interior.len(), 1);
        let mut opp: Vec<usize> = interior[0].opposite.iter().map(|o| o.unwrap()).collect();
        opp.sort();
        let mut ends = vec![interior[0].a, interior[0].b];
        ends.extend(opp);
        ends.sort();
        assert_eq!(ends, vec![0, 1, 2, 3]);
    }
}

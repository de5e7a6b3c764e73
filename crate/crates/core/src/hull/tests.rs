use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn set(v: &[(f64, f64)]) -> PointSet {
    PointSet::new(v.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap()
}

fn uniform_square(n: usize, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PointSet::new((0..n).map(|_| Point2::new(rng.gen(), rng.gen())).collect()).unwrap()
}

fn annulus_sample(n: usize, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = Vec::new();
    while v.len() < n {
        let p = Point2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        if (0.25..=0.5).contains(&p.norm()) {
            v.push(p);
        }
    }
    PointSet::new(v).unwrap()
}

/// Andrew's monotone chain.
fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let mut lower: Vec<Point2> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && (lower[lower.len() - 1] - lower[lower.len() - 2]).cross(q - lower[lower.len() - 2]) <= 0.0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && (upper[upper.len() - 1] - upper[upper.len() - 2]).cross(q - upper[upper.len() - 2]) <= 0.0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn inside_convex(poly: &[Point2], x: Point2) -> bool {
    (0..poly.len()).all(|i| (poly[(i + 1) % poly.len()] - poly[i]).cross(x - poly[i]) >= 0.0)
}

#[test]
fn rejects_bad_radius_and_empty_sample() {
    let s = set(&[(0.0, 0.0)]);
    assert!(matches!(build_hull(&s, 0.0), Err(Error::Domain(_))));
    assert!(build_hull(&s, -1.0).is_err());
    assert!(build_hull(&s, f64::NAN).is_err());
    assert!(build_hull(&PointSet::new(vec![]).unwrap(), 1.0).is_err());
}

#[test]
fn single_point_is_isolated() {
    let h = build_hull(&set(&[(1.0, 2.0)]), 0.5).unwrap();
    assert_eq!(h.isolated, vec![0]);
    assert!(h.boundary.arcs.is_empty());
    assert_eq!(h.boundary_length(), 0.0);
    assert!(h.contains(Point2::new(1.0, 2.0)));
    assert!(!h.contains(Point2::new(1.0, 2.1)));
}

#[test]
fn far_pair_is_two_isolated_points() {
    let h = build_hull(&set(&[(0.0, 0.0), (1.0, 0.0)]), 0.4).unwrap();
    assert_eq!(h.isolated, vec![0, 1]);
    assert!(h.boundary.arcs.is_empty());
    assert_eq!(boundary_length(&h), 0.0);
}

#[test]
fn close_pair_is_still_two_points() {
    // Every point strictly between the two samples lies in an empty disc
    // centered on the bisector, so the hull is the pair itself.
    let s = set(&[(0.0, 0.0), (1.0, 0.0)]);
    let h = build_hull(&s, 1.0).unwrap();
    assert_eq!(h.boundary_length(), 0.0);
    assert_eq!(h.isolated, vec![0, 1]);
    let oracle = MembershipOracle::new(&s, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let x = Point2::new(rng.gen_range(-0.2..1.2), rng.gen_range(-0.6..0.6));
        assert_eq!(h.contains(x), oracle.contains(x, 1e-3), "{x}");
    }
    assert!(!oracle.contains(Point2::new(0.5, 0.0), 1e-3));
}

#[test]
fn triangle_has_three_concave_arcs() {
    let s = set(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.8)]);
    let r = 2.0;
    let h = build_hull(&s, r).unwrap();
    assert_eq!(h.boundary.arcs.len(), 3);
    assert_eq!(h.boundary.chains.len(), 1);
    assert!(h.isolated.is_empty());
    assert_eq!(h.regular, vec![0, 1, 2]);
    let expect: f64 = [(0, 1), (1, 2), (2, 0)]
        .iter()
        .map(|&(i, j)| 2.0 * r * (s.get(i).dist(s.get(j)) / (2.0 * r)).asin())
        .sum();
    assert!((h.boundary_length() - expect).abs() < 1e-12);
    for a in &h.boundary.arcs {
        assert!(a.arc.sweep < 0.0);
        assert!((a.arc.radius - r).abs() == 0.0);
        for &k in &[a.contacts.0, a.contacts.1] {
            assert!((s.get(k).dist(a.arc.center) - r).abs() < 1e-9 * r);
        }
    }
    assert!(h.boundary.chain_areas[0] > 0.0);
    assert!(h.contains(Point2::new(0.5, 0.3)));
    assert!(!h.contains(Point2::new(0.5, 0.01)));
}

#[test]
fn unit_square_center_inside_for_large_radius() {
    let s = set(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
    let h = build_hull(&s, 10.0).unwrap();
    let x = Point2::new(0.5, 0.5);
    assert!(h.contains(x));
    assert!(hull_membership_oracle(&s, 10.0, x, 1e-2));
    assert_eq!(h.boundary.arcs.len(), 4);
}

#[test]
fn far_points_are_outside() {
    let s = uniform_square(300, 4);
    let h = build_hull(&s, 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..500 {
        let x = Point2::new(rng.gen_range(-0.5..1.5), rng.gen_range(-0.5..1.5));
        if crate::geom::dist_to_set(x, &s).unwrap() >= 0.1 {
            assert!(!h.contains(x));
        }
    }
    for p in s.iter() {
        assert!(h.contains(p));
    }
}

#[test]
fn annulus_hull_has_a_hole() {
    let s = annulus_sample(200, 2);
    let h = build_hull(&s, 0.25).unwrap();
    assert!(h.boundary.chains.len() >= 2);
    assert!(h.boundary.chain_areas.iter().any(|&a| a < 0.0));
    assert!(!h.contains(Point2::new(0.0, 0.0)));
    assert!(h.contains(Point2::new(0.375, 0.0)) || h.contains(Point2::new(-0.375, 0.0)));
    assert_eq!(h.boundary.component_count(), 1);
}

#[test]
fn agrees_with_oracle_on_random_instances() {
    let pitch = 1e-3;
    for seed in 0..4u64 {
        let s = uniform_square(40 + 20 * seed as usize, 100 + seed);
        let r = [0.08, 0.15, 0.3, 1.0][seed as usize];
        let h = build_hull(&s, r).unwrap();
        let oracle = MembershipOracle::new(&s, r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut checked = 0;
        for _ in 0..150 {
            let x = Point2::new(rng.gen_range(-0.1..1.1), rng.gen_range(-0.1..1.1));
            if h.boundary_distance(x) <= 2.0 * pitch {
                continue;
            }
            checked += 1;
            assert_eq!(h.contains(x), oracle.contains(x, pitch), "seed {seed} x {x}");
            assert_eq!(h.contains(x), !h.in_empty_disc(x), "seed {seed} x {x}");
        }
        assert!(checked > 100);
    }
}

#[test]
fn convex_limit_matches_convex_hull_perimeter() {
    let s = uniform_square(60, 8);
    let diam = s.diameter();
    let h = build_hull(&s, 1e3 * diam).unwrap();
    let poly = convex_hull(s.points());
    let per: f64 = (0..poly.len()).map(|i| poly[i].dist(poly[(i + 1) % poly.len()])).sum();
    assert!((h.boundary_length() - per).abs() / per < 1e-6);
    assert_eq!(h.boundary.arcs.len(), poly.len());
}

#[test]
fn area_of_triangle_hull_by_green_matches_raster_count() {
    let s = set(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.8)]);
    let h = build_hull(&s, 0.7).unwrap();
    let n = 600;
    let mut inside = 0usize;
    for i in 0..n {
        for j in 0..n {
            let x = Point2::new((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64 * 0.8);
            if h.contains(x) {
                inside += 1;
            }
        }
    }
    let raster = inside as f64 * 0.8 / (n * n) as f64;
    assert!((raster - h.area()).abs() < 5e-3, "{raster} vs {}", h.area());
}

#[test]
fn row_crossings_agree_with_contains() {
    let s = annulus_sample(150, 5);
    let h = build_hull(&s, 0.2).unwrap();
    for k in 0..40 {
        let y = -0.5 + (k as f64 + 0.37) / 40.0;
        let cr = h.row_crossings(y);
        for i in 0..60 {
            let x = -0.55 + (i as f64 + 0.41) / 55.0;
            let w: i32 = cr.iter().filter(|c| c.0 > x).map(|c| c.1).sum();
            assert_eq!(w != 0, h.contains(Point2::new(x, y)));
        }
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn cloud() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 3..40)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn sample_inside_and_hull_inside_convex_hull(v in cloud(), r in 0.05f64..2.0, q in prop::collection::vec((-0.5f64..1.5, -0.5f64..1.5), 40)) {
            let s = set(&v);
            let h = build_hull(&s, r).unwrap();
            for p in s.iter() {
                prop_assert!(h.contains(p));
            }
            let poly = convex_hull(s.points());
            for &(x, y) in &q {
                let x = Point2::new(x, y);
                if poly.len() >= 3 && !inside_convex(&poly, x) {
                    prop_assert!(!h.contains(x));
                }
            }
            let iso: std::collections::HashSet<_> = h.isolated.iter().collect();
            prop_assert!(h.regular.iter().all(|i| !iso.contains(i)));
        }

        #[test]
        fn monotone_in_radius(v in cloud(), r1 in 0.05f64..0.5, f in 1.0f64..4.0, q in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 60)) {
            let s = set(&v);
            let h1 = build_hull(&s, r1).unwrap();
            let h2 = build_hull(&s, r1 * f).unwrap();
            for &(x, y) in &q {
                let x = Point2::new(x, y);
                if h1.boundary_distance(x) > 1e-9 && h1.contains(x) {
                    prop_assert!(h2.contains(x));
                }
            }
        }

        #[test]
        fn winding_matches_exact_predicate(v in cloud(), r in 0.05f64..1.0, q in prop::collection::vec((-0.2f64..1.2, -0.2f64..1.2), 60)) {
            let s = set(&v);
            let h = build_hull(&s, r).unwrap();
            for &(x, y) in &q {
                let x = Point2::new(x, y);
                if h.boundary_distance(x) > 1e-9 {
                    prop_assert_eq!(h.contains(x), !h.in_empty_disc(x));
                }
            }
        }
    }
}

use super::*;
use crate::geom::Point2;
use std::f64::consts::PI;

struct Fn2<F: Fn(Point2) -> bool + Sync>(F, BBox);

impl<F: Fn(Point2) -> bool + Sync> Region for Fn2<F> {
    fn contains(&self, p: Point2) -> bool {
        (self.0)(p)
    }
    fn bounding_box(&self) -> BBox {
        self.1
    }
}

fn bb(x0: f64, y0: f64, x1: f64, y1: f64) -> BBox {
    BBox::new(Point2::new(x0, y0), Point2::new(x1, y1))
}

fn disc(rad: f64) -> Fn2<impl Fn(Point2) -> bool + Sync> {
    Fn2(move |p: Point2| p.norm() <= rad, bb(-rad, -rad, rad, rad))
}

fn square() -> Fn2<impl Fn(Point2) -> bool + Sync> {
    Fn2(|p: Point2| (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y), bb(0.0, 0.0, 1.0, 1.0))
}

fn annulus() -> Fn2<impl Fn(Point2) -> bool + Sync> {
    Fn2(|p: Point2| (0.25..=0.5).contains(&p.norm()), bb(-0.5, -0.5, 0.5, 0.5))
}

fn raster<R: Region>(r: &R, margin: f64, h: f64) -> GridMask {
    let g = Grid::covering(r.bounding_box(), margin, h).unwrap();
    rasterize(r, &g, margin).unwrap()
}

#[test]
fn rasterized_areas() {
    let m = raster(&square(), 0.05, 0.01);
    assert!((m.count() as f64 - 1e4).abs() / 1e4 < 0.01);
    let m = raster(&disc(0.5), 0.05, 0.005);
    assert!((m.area() - PI / 4.0).abs() / (PI / 4.0) < 0.005);
}

#[test]
fn rasterize_rejects_small_window() {
    let g = Grid::new(Point2::new(0.0, 0.0), 0.01, 50, 50).unwrap();
    let e = rasterize(&square(), &g, 0.0).unwrap_err();
    assert!(e.to_string().contains("deficit"));
}

#[test]
fn closing_keeps_convex_and_separated_sets() {
    let m = raster(&disc(0.5), 0.3, 0.01);
    let c = closing(&m, 0.25).unwrap();
    assert!(rconvexity_check(&m, 0.25, 1.0).unwrap());
    assert!(m.is_subset(&c).unwrap());

    let two = Fn2(
        |p: Point2| p.dist(Point2::new(-0.5, 0.0)) <= 0.2 || p.dist(Point2::new(0.5, 0.0)) <= 0.2,
        bb(-0.7, -0.2, 0.7, 0.2),
    );
    let m = raster(&two, 0.2, 0.005);
    assert!(rconvexity_check(&m, 0.15, DEFAULT_BAND).unwrap());
    assert_eq!(closing(&m, 0.15).unwrap().component_count(), 2);
}

#[test]
fn closing_fills_narrow_notch_like_brute_force() {
    // Disc with a wedge notch whose mouth is narrower than 2 rho.
    let pac = Fn2(
        |p: Point2| p.norm() <= 0.4 && !(p.x > 0.0 && p.y.abs() < 0.3 * p.x),
        bb(-0.4, -0.4, 0.4, 0.4),
    );
    let m = raster(&pac, 0.2, 0.0125);
    let rho = 0.15;
    let c = closing(&m, rho).unwrap();
    let (w, h) = (m.width(), m.height());
    let d = edt(&m).unwrap();
    let hh = m.h();
    let far: Vec<(usize, usize)> = (0..w * h)
        .filter(|&k| d.values[k] > rho * (1.0 + 1e-12))
        .map(|k| (k % w, k / w))
        .collect();
    for j in 0..h {
        for i in 0..w {
            let x = m.grid.center(i, j);
            let cut = far.iter().any(|&(a, b)| m.grid.center(a, b).dist(x) <= rho * (1.0 + 1e-12));
            assert_eq!(c.get(i, j), !cut, "cell {i},{j}");
        }
    }
    let mouth = m.grid.cell_of(Point2::new(0.3, 0.0)).unwrap();
    assert!(!m.get(mouth.0, mouth.1));
    assert!(c.get(mouth.0, mouth.1));
    let _ = hh;
}

#[test]
fn rolling_and_corners() {
    let m = raster(&disc(0.5), 0.5, 0.01);
    assert!(rolling_check(&m, 0.2, 0.02).unwrap());
    let l = Fn2(
        |p: Point2| (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y) && !(p.x > 0.5 && p.y > 0.5),
        bb(0.0, 0.0, 1.0, 1.0),
    );
    let m = raster(&l, 0.5, 0.01);
    assert!(!rolling_check(&m, 0.2, 0.02).unwrap());
    // Exhaustive: no admissible center within r + tol of the corner cell.
    let d = edt(&m).unwrap();
    let corner = m.grid.cell_of(Point2::new(0.495, 0.495)).unwrap();
    let cp = m.grid.center(corner.0, corner.1);
    let w = m.width();
    let near = (0..m.grid.len()).any(|k| d.values[k] >= 0.18 && m.grid.center(k % w, k / w).dist(cp) <= 0.22);
    assert!(!near);
    assert!(rolling_check(&m, 0.2, 0.02).is_ok());
    let tight = raster(&l, 0.1, 0.01);
    assert!(rolling_check(&tight, 0.2, 0.02).is_err());
}

#[test]
fn ilc_examples() {
    let m = raster(&disc(0.5), 0.05, 0.02);
    assert!(ilc_check(&m, 0.2).unwrap());
    let two = Fn2(
        |p: Point2| p.dist(Point2::new(-0.5, 0.0)) <= 0.3 || p.dist(Point2::new(0.5, 0.0)) <= 0.3,
        bb(-0.8, -0.3, 0.8, 0.3),
    );
    let m = raster(&two, 0.05, 0.02);
    assert!(ilc_check(&m, 0.2).unwrap());
    // Two squares meeting at a corner: pinched.
    let bow = Fn2(
        |p: Point2| (p.x.abs() <= 0.5 && p.y.abs() <= 0.5) && (p.x * p.y >= 0.0),
        bb(-0.5, -0.5, 0.5, 0.5),
    );
    let m = raster(&bow, 0.05, 0.02);
    assert!(!ilc_check(&m, 0.2).unwrap());
    assert!(ilc_check(&m, 0.01).is_err());
}

#[test]
fn steiner_parallel_volumes() {
    let m = raster(&square(), 0.12, 1e-3);
    let v = parallel_volume(&m, 0.1).unwrap();
    let want = 1.0 + 0.4 + PI * 0.01;
    assert!((v - want).abs() / want < 0.01, "{v}");
    let m = raster(&disc(0.5), 0.12, 1e-3);
    let v = parallel_volume(&m, 0.1).unwrap();
    assert!((v - PI * 0.36).abs() / (PI * 0.36) < 0.01);
    assert!(parallel_volume(&m, 0.2).is_err());
}

#[test]
fn minkowski_contents() {
    for (name, m, want) in [
        ("disc", raster(&disc(0.5), 0.1, 1.2 / 1024.0), PI),
        ("square", raster(&square(), 0.1, 1.2 / 1024.0), 4.0),
        ("annulus", raster(&annulus(), 0.1, 1.2 / 1024.0), 1.5 * PI),
    ] {
        let eps = default_eps_list(m.h());
        let o = outer_minkowski(&m, &eps).unwrap();
        let t = two_sided_minkowski(&m, &eps).unwrap();
        assert!((o - want).abs() / want < 0.02, "{name} outer {o}");
        assert!((t - want).abs() / want < 0.02, "{name} two-sided {t}");
    }
    let m = raster(&square(), 0.1, 0.01);
    assert!(outer_minkowski(&m, &[0.03]).is_err());
    assert!(outer_minkowski(&m, &[0.001, 0.03]).is_err());
}

#[test]
fn l_shape_parallel_volume_is_quadratic() {
    let l = Fn2(
        |p: Point2| (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y) && !(p.x > 0.5 && p.y > 0.5),
        bb(0.0, 0.0, 1.0, 1.0),
    );
    let m = raster(&l, 0.12, 2e-3);
    let eps: Vec<f64> = (1..=5).map(|k| 0.02 * k as f64).collect();
    let v: Vec<f64> = eps.iter().map(|&e| parallel_volume(&m, e).unwrap()).collect();
    // Exact for the outer parallel set of an L: A + 4 eps + (3/4) pi eps^2... fit a quadratic.
    let n = eps.len() as f64;
    let s = |f: &dyn Fn(f64) -> f64| eps.iter().map(|&e| f(e)).sum::<f64>();
    let (s1, s2, s3, s4) = (s(&|e| e), s(&|e| e * e), s(&|e| e.powi(3)), s(&|e| e.powi(4)));
    let sy = v.iter().sum::<f64>();
    let sxy: f64 = eps.iter().zip(&v).map(|(e, y)| e * y).sum();
    let sx2y: f64 = eps.iter().zip(&v).map(|(e, y)| e * e * y).sum();
    let a = [[n, s1, s2], [s1, s2, s3], [s2, s3, s4]];
    let b = [sy, sxy, sx2y];
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(a);
    let coef: Vec<f64> = (0..3)
        .map(|c| {
            let mut m = a;
            for r in 0..3 {
                m[r][c] = b[r];
            }
            det3(m) / d
        })
        .collect();
    for (e, y) in eps.iter().zip(&v) {
        let fit = coef[0] + coef[1] * e + coef[2] * e * e;
        assert!((fit - y).abs() < 1e-3 * y, "{fit} vs {y}");
    }
    assert!((coef[1] - 4.0).abs() < 0.05, "{coef:?}");
}

#[test]
fn measure_and_hausdorff_distances() {
    let g = Grid::covering(bb(-0.6, -0.6, 2.6, 0.6), 0.05, 0.005).unwrap();
    let big = rasterize(&disc(0.5), &g, 0.05).unwrap();
    let small = rasterize(&disc(0.25), &g, 0.05).unwrap();
    assert_eq!(measure_distance(&big, &big).unwrap(), 0.0);
    let md = measure_distance(&big, &small).unwrap();
    assert!((md - PI * (0.25 - 0.0625)).abs() / (PI * 0.1875) < 0.01);
    let sq1 = Fn2(|p: Point2| (0.0..=1.0).contains(&p.x) && p.y.abs() <= 0.5, bb(0.0, -0.5, 1.0, 0.5));
    let sq2 = Fn2(|p: Point2| (1.5..=2.5).contains(&p.x) && p.y.abs() <= 0.5, bb(1.5, -0.5, 2.5, 0.5));
    let (a, b) = (rasterize(&sq1, &g, 0.0).unwrap(), rasterize(&sq2, &g, 0.0).unwrap());
    assert!((measure_distance(&a, &b).unwrap() - 2.0).abs() < 0.02);

    assert_eq!(hausdorff_masks(&big, &big).unwrap(), 0.0);
    let hm = hausdorff_masks(&big, &small).unwrap();
    let hb = hausdorff_boundaries(&big, &small).unwrap();
    assert!((hm - 0.25).abs() < 0.01 && (hb - 0.25).abs() < 0.01, "{hm} {hb}");

    let other = Grid::covering(bb(-0.6, -0.6, 0.6, 0.6), 0.05, 0.005).unwrap();
    let c = rasterize(&disc(0.5), &other, 0.05).unwrap();
    assert!(matches!(measure_distance(&big, &c), Err(Error::GridMismatch(_))));
    assert!(hausdorff_masks(&big, &GridMask::empty(g)).is_err());
}

#[test]
fn holed_disc_separates_set_and_boundary_distances() {
    let g = Grid::covering(bb(-0.5, -0.5, 0.5, 0.5), 0.03, 1.06 / 128.0).unwrap();
    let full = rasterize(&disc(0.5), &g, 0.0).unwrap();
    let holed = rasterize(&Fn2(|p: Point2| (0.1..=0.5).contains(&p.norm()), bb(-0.5, -0.5, 0.5, 0.5)), &g, 0.0).unwrap();
    let hm = hausdorff_masks(&full, &holed).unwrap();
    let hb = hausdorff_boundaries(&full, &holed).unwrap();
    // Brute-force directed scans over cell centers.
    let dir = |a: &GridMask, b: &GridMask| {
        let pa = a.occupied_centers();
        let pb = b.occupied_centers();
        pa.iter()
            .map(|x| pb.iter().map(|y| x.dist(*y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let bm = dir(&full, &holed).max(dir(&holed, &full));
    let (bf, bh) = (full.boundary(), holed.boundary());
    let bbd = dir(&bf, &bh).max(dir(&bh, &bf));
    assert!((hm - bm).abs() < 1e-12 && (hb - bbd).abs() < 1e-12);
    assert!(hm < 0.11 && hb > 0.35, "{hm} {hb}");
}

#[test]
fn shrinking_dilations_converge_fully() {
    let g = Grid::covering(bb(-0.5, -0.5, 0.5, 0.5), 0.3, 2e-3).unwrap();
    let base = rasterize(&disc(0.5), &g, 0.3).unwrap();
    let mut last = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for k in [4.0, 8.0, 16.0, 32.0] {
        let ak = dilate(&base, 1.0 / k).unwrap();
        let cur = (
            hausdorff_masks(&ak, &base).unwrap(),
            hausdorff_boundaries(&ak, &base).unwrap(),
            measure_distance(&ak, &base).unwrap(),
        );
        assert!(cur.0 <= last.0 && cur.1 <= last.1 && cur.2 <= last.2);
        last = cur;
    }
    assert!(last.0 < 0.04 && last.2 < 0.11);
}

#[test]
fn pbm_round_trip() {
    let m = raster(&annulus(), 0.05, 0.02);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a.pbm");
    write_pbm(&m, &p).unwrap();
    let back = read_pbm(&p).unwrap();
    assert_eq!(back, m);
    assert!(pbm::parse_pbm("P1\n2 2\n0 1 1 0\n", "x").is_err());
    assert!(pbm::parse_pbm("P1\n# origin_x=0 origin_y=0 h=1\n2 2\n0 1 1\n", "x").is_err());
    let ok = pbm::parse_pbm("P1\n# origin_x=0 origin_y=0 h=1\n2 2\n0 1\n1 0\n", "x").unwrap();
    assert!(ok.get(1, 1) && ok.get(0, 0) && !ok.get(0, 1));
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn small_mask() -> impl Strategy<Value = GridMask> {
        (prop::collection::vec(any::<bool>(), 24 * 24), 0.05f64..0.5).prop_map(|(bits, p)| {
            let g = Grid::new(Point2::new(0.0, 0.0), 1.0, 48, 48).unwrap();
            let mut m = GridMask::empty(g);
            for (k, b) in bits.into_iter().enumerate() {
                let keep = b && ((k * 7919) % 100) as f64 / 100.0 < p + 0.3;
                m.set(12 + k % 24, 12 + k / 24, keep);
            }
            m
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn adjunction_and_idempotence(m in small_mask(), rho in 1.0f64..6.0) {
            let d = dilate(&m, rho).unwrap();
            prop_assert!(m.is_subset(&erode(&d, rho).unwrap()).unwrap());
            prop_assert!(dilate(&erode(&m, rho).unwrap(), rho).unwrap().is_subset(&m).unwrap());
            let c = closing(&m, rho).unwrap();
            prop_assert!(m.is_subset(&c).unwrap());
            let cc = closing(&c, rho).unwrap();
            let diff = cc.symmetric_difference(&c).unwrap();
            let b = edt(&c.boundary()).map(|f| f.values).unwrap_or_default();
            for (k, &x) in diff.cells.iter().enumerate() {
                prop_assert!(!x || b[k] <= 1.0);
            }
        }

        #[test]
        fn closing_monotone_in_radius(m in small_mask(), r1 in 1.0f64..4.0, f in 1.0f64..2.0) {
            let c1 = closing(&m, r1).unwrap();
            let c2 = closing(&m, r1 * f).unwrap();
            // Monotone up to a one-cell band: anything c1 adds over c2 touches c2.
            let extra = c1.difference(&c2).unwrap();
            if !extra.is_empty() {
                prop_assert!(!c2.is_empty());
                let d = edt(&c2).unwrap();
                for k in 0..m.grid.len() {
                    if extra.cells[k] { prop_assert!(d.values[k] <= m.h() * (1.0 + 1e-12), "cell {} at {}", k, d.values[k]); }
                }
            }
        }

        #[test]
        fn edt_is_lipschitz(m in small_mask()) {
            prop_assume!(!m.is_empty());
            let f = edt(&m).unwrap();
            let w = m.width();
            for k in 0..m.grid.len() {
                if m.cells[k] { prop_assert_eq!(f.values[k], 0.0); }
                if k % w + 1 < w { prop_assert!((f.values[k] - f.values[k + 1]).abs() <= 1.0 + 1e-12); }
                if k + w < f.values.len() { prop_assert!((f.values[k] - f.values[k + w]).abs() <= 1.0 + 1e-12); }
            }
        }
    }
}

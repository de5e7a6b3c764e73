//! Acceptance criteria 1-10. Each criterion prints one PASS/FAIL line on
//! stderr (unbuffered by the harness) and the test fails if any criterion
//! fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rconvex_core::excess_mass::{
    build_candidate_family, default_bandwidth, default_family, default_lambda_grid, family_grid, lambda_sweep,
    level_set_estimate, split_sample, uniform_deviation, DensityModel, DEFAULT_SWEEP_STEPS,
};
use rconvex_core::experiments::{run, run_convergence, run_table1, ExperimentConfig, ExperimentKind};
use rconvex_core::geom::Point2;
use rconvex_core::hull::{build_hull, MembershipOracle};
use rconvex_core::raster::{
    default_eps_list, edt, ilc_check, measure_distance, outer_minkowski, parallel_volume, rasterize, rconvexity_check,
    rolling_check, Grid, GridMask, DEFAULT_BAND,
};
use rconvex_core::shapes::{make_fig_shape, sample_uniform, FigShape, SampleRequest, ShapeSpec, Variant};

/// Seed shared by every criterion.
const MASTER_SEED: u64 = 20_240_601;

struct Outcome {
    id: usize,
    pass: bool,
    detail: String,
}

fn emit(o: &Outcome) {
    let line = format!(
        "criterion {:>2}: {} | {}\n",
        o.id,
        if o.pass { "PASS" } else { "FAIL" },
        o.detail
    );
    let mut err = std::io::stderr();
    let _ = err.write_all(line.as_bytes());
    let _ = err.flush();
}

fn config(kind: ExperimentKind, shape: &str, r: f64, n: &[usize], reps: usize, grid_h: Option<f64>, out: &Path) -> ExperimentConfig {
    ExperimentConfig {
        experiment: kind,
        shape: shape.into(),
        shape_params: BTreeMap::new(),
        r_list: vec![r],
        n_list: n.to_vec(),
        replications: reps,
        master_seed: MASTER_SEED,
        grid_h,
        out_dir: out.to_path_buf(),
        workers: 0,
    }
}

fn within(v: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&v)
}

/// Returns `(mean, std, seconds)` of the single summary row.
fn table1_row(shape: &str, r: f64, n: usize, out: &Path) -> (f64, f64, f64) {
    let cfg = config(ExperimentKind::Table1, shape, r, &[n], 100, None, out);
    let t0 = Instant::now();
    let t = run_table1(&cfg).expect("table1 run");
    let secs = t0.elapsed().as_secs_f64();
    (t.summary[0].mean, t.summary[0].std, secs)
}

fn criterion_1_2(dir: &Path) -> Vec<Outcome> {
    let (m5, s5, secs) = table1_row("astroid", 0.25, 5000, dir);
    let c1 = Outcome {
        id: 1,
        pass: within(m5, 5.66, 5.74) && within(s5, 0.05, 0.09) && secs <= 300.0,
        detail: format!("astroid r=0.25 n=5000 R=100: mean {m5:.4} in [5.66, 5.74], std {s5:.4} in [0.05, 0.09], {secs:.1} s <= 300 s"),
    };
    let (m10, s10, secs10) = table1_row("astroid", 0.25, 10_000, dir);
    let c2 = Outcome {
        id: 2,
        pass: within(m10, 5.73, 5.81) && m10 > m5,
        detail: format!("astroid r=0.25 n=10000 R=100: mean {m10:.4} in [5.73, 5.81] and > {m5:.4} (std {s10:.4}, {secs10:.1} s)"),
    };
    vec![c1, c2]
}

fn criterion_3(dir: &Path) -> Outcome {
    let (m, s, secs) = table1_row("catalan_trisectrix", 2.0, 5000, dir);
    Outcome {
        id: 3,
        pass: within(m, 20.45, 20.80),
        detail: format!("trisectrix r=2 n=5000 R=100: mean {m:.4} in [20.45, 20.80] (std {s:.4}, {secs:.1} s)"),
    }
}

fn criterion_4(dir: &Path) -> Outcome {
    // The annulus box is 1 wide, so h = 1/2048 gives a 2048-wide raster.
    let cfg = config(ExperimentKind::Convergence, "annulus", 0.25, &[10_000], 20, Some(1.0 / 2048.0), dir);
    let c = run_convergence(&cfg).expect("convergence run");
    let t = run_table1(&cfg).expect("table1 run");
    let row = &c.rows[0];
    let mean_l = t.summary[0].mean;
    let want = 1.5 * PI;
    let rel = (mean_l / want - 1.0).abs();
    Outcome {
        id: 4,
        pass: row.median_d_h <= 0.05 && row.median_d_h_boundary <= 0.05 && rel <= 0.03,
        detail: format!(
            "annulus r=0.25 n=10000, 20 seeds, h=1/2048: median d_H {:.4} <= 0.05, median d_H(boundaries) {:.4} <= 0.05, mean L {mean_l:.4} within 3% of 1.5pi ({:.2}%)",
            row.median_d_h,
            row.median_d_h_boundary,
            100.0 * rel
        ),
    }
}

fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let half = |it: &mut dyn Iterator<Item = Point2>| {
        let mut h: Vec<Point2> = Vec::new();
        for q in it {
            while h.len() >= 2 && (h[h.len() - 1] - h[h.len() - 2]).cross(q - h[h.len() - 2]) <= 0.0 {
                h.pop();
            }
            h.push(q);
        }
        h.pop();
        h
    };
    let mut lower = half(&mut p.iter().copied());
    lower.extend(half(&mut p.iter().rev().copied()));
    lower
}

fn in_convex_polygon(poly: &[Point2], x: Point2) -> bool {
    (0..poly.len()).all(|k| (poly[(k + 1) % poly.len()] - poly[k]).cross(x - poly[k]) >= 0.0)
}

fn criterion_5() -> Outcome {
    let disc = ShapeSpec::parse("disc", "radius=0.5").unwrap();
    let s = sample_uniform(&SampleRequest { shape: disc, n: 5000, seed: MASTER_SEED }).unwrap();
    let hull = build_hull(&s, 5.0).unwrap();
    let l = hull.boundary_length();
    let rel = (l / PI - 1.0).abs();
    let poly = convex_hull(s.points());
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED + 5);
    let (mut tested, mut wrong) = (0, 0);
    while tested < 10_000 {
        let x = Point2::new(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
        if in_convex_polygon(&poly, x) {
            continue;
        }
        tested += 1;
        if hull.contains(x) {
            wrong += 1;
        }
    }
    Outcome {
        id: 5,
        pass: rel <= 0.02 && wrong == 0,
        detail: format!(
            "disc 0.5, r=5, n=5000: L {l:.5} within 2% of pi ({:.3}%); {wrong} of {tested} points outside conv(sample) lie in S_n",
            100.0 * rel
        ),
    }
}

fn brute_edt(mask: &GridMask) -> Vec<f64> {
    let (w, h) = (mask.width(), mask.height());
    let occ: Vec<(i64, i64)> = (0..w * h)
        .filter(|&k| mask.cells[k])
        .map(|k| ((k % w) as i64, (k / w) as i64))
        .collect();
    (0..w * h)
        .map(|k| {
            let (i, j) = ((k % w) as i64, (k / w) as i64);
            let d2 = occ.iter().map(|&(a, b)| (a - i).pow(2) + (b - j).pow(2)).min().unwrap();
            (d2 as f64).sqrt() * mask.h()
        })
        .collect()
}

fn criterion_6() -> Outcome {
    let instances = [
        ("disc", "radius=0.5", 400, 0.2),
        ("disc", "radius=0.5", 1000, 1.0),
        ("annulus", "", 600, 0.25),
        ("annulus", "", 1500, 0.1),
        ("astroid", "", 800, 0.25),
        ("rectangle", "", 300, 0.3),
        ("lens", "", 500, 0.2),
        ("two_discs", "", 700, 0.3),
        ("catalan_trisectrix", "", 1000, 2.0),
        ("fig1b", "", 900, 0.1),
    ];
    let mut worst = usize::MAX;
    let mut notes = Vec::new();
    for (k, (name, params, n, r)) in instances.iter().enumerate() {
        let shape = ShapeSpec::parse(name, params).unwrap();
        let s = sample_uniform(&SampleRequest { shape, n: *n, seed: MASTER_SEED + k as u64 }).unwrap();
        let hull = build_hull(&s, *r).unwrap();
        let oracle = MembershipOracle::new(&s, *r);
        let b = hull.bounding_box().expand(0.25 * r);
        let pitch = r / 200.0;
        let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED + 100 + k as u64);
        let (mut asked, mut agree) = (0, 0);
        while asked < 1000 {
            let x = Point2::new(rng.gen_range(b.min.x..b.max.x), rng.gen_range(b.min.y..b.max.y));
            if hull.boundary_distance(x) <= 2.0 * pitch {
                continue;
            }
            asked += 1;
            if hull.contains(x) == oracle.contains(x, pitch) {
                agree += 1;
            }
        }
        worst = worst.min(agree);
        notes.push(format!("{name}:{agree}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(MASTER_SEED + 6);
    let g = Grid::new(Point2::new(0.0, 0.0), 0.5, 64, 64).unwrap();
    let mut edt_masks = 0;
    let mut edt_ok = true;
    for density in [0.002, 0.01, 0.05, 0.2, 0.5, 0.9] {
        for _ in 0..4 {
            let cells: Vec<bool> = (0..g.len()).map(|_| rng.gen::<f64>() < density).collect();
            let mut m = GridMask::empty(g);
            m.cells = cells;
            if m.is_empty() {
                m.set(17, 40, true);
            }
            edt_masks += 1;
            edt_ok &= edt(&m).unwrap().values == brute_edt(&m);
        }
    }
    let mut single = GridMask::empty(g);
    single.set(63, 0, true);
    edt_masks += 1;
    edt_ok &= edt(&single).unwrap().values == brute_edt(&single);
    Outcome {
        id: 6,
        pass: worst >= 998 && edt_ok,
        detail: format!(
            "oracle agreement per instance (min {worst} >= 998 of 1000) [{}]; edt == brute force on {edt_masks} 64x64 masks: {edt_ok}",
            notes.join(" ")
        ),
    }
}

fn fig_mask(which: FigShape, r: f64, cells_per_r: f64) -> GridMask {
    let s = make_fig_shape(which, r).unwrap();
    let g = Grid::covering(s.bounding_box, 2.5 * r, r / cells_per_r).unwrap();
    rasterize(&s, &g, 2.5 * r).unwrap()
}

fn criterion_7() -> Outcome {
    let r = 0.25;
    let a = fig_mask(FigShape::Fig1a, r, 40.0);
    let fig1a = rconvexity_check(&a, r, DEFAULT_BAND).unwrap();
    let b = fig_mask(FigShape::Fig1b, r, 40.0);
    let fig1b_roll = rolling_check(&b, r, 2.0 * b.h()).unwrap();
    let fig1b_convex = rconvexity_check(&b, r, DEFAULT_BAND).unwrap();
    let c = fig_mask(FigShape::Fig3Pinch, r, 80.0);
    let fig3_ilc = ilc_check(&c, 0.1 * r).unwrap();
    // Proposition direction over the whole shape corpus at several radii.
    let (mut convex, mut violations) = (0, Vec::new());
    for v in Variant::ALL {
        let s = ShapeSpec::with_defaults(v);
        for rho in [0.05, 0.1, 0.25, 0.5] {
            let h = rho / 16.0;
            let g = Grid::covering(s.bounding_box, 2.5 * rho, h).unwrap();
            let m = rasterize(&s, &g, 2.5 * rho).unwrap();
            if rconvexity_check(&m, rho, DEFAULT_BAND).unwrap() {
                convex += 1;
                if !rolling_check(&m, rho, 2.0 * h).unwrap() {
                    violations.push(format!("{v}@{rho}"));
                }
            }
        }
    }
    Outcome {
        id: 7,
        pass: fig1a && fig1b_roll && !fig1b_convex && !fig3_ilc && violations.is_empty(),
        detail: format!(
            "fig1a r-convex {fig1a}; fig1b rolls {fig1b_roll}, r-convex {fig1b_convex}; fig3_pinch ILC {fig3_ilc}; {convex} r-convex corpus masks, rolling failures {violations:?}"
        ),
    }
}

fn default_mask(s: &ShapeSpec, margin: f64) -> GridMask {
    let h = s.bounding_box.diagonal() / 2048.0;
    let g = Grid::covering(s.bounding_box, margin.max(64.0 * h), h).unwrap();
    rasterize(s, &g, margin.max(64.0 * h)).unwrap()
}

fn criterion_8() -> Outcome {
    let square = ShapeSpec::parse("rectangle", "hw=0.5,hh=0.5").unwrap();
    let v = parallel_volume(&default_mask(&square, 0.15), 0.1).unwrap();
    let want = 1.43142;
    let vrel = (v / want - 1.0).abs();
    let mut ok = vrel <= 0.01;
    let mut notes = vec![format!("parallel_volume {v:.5} vs 1.43142 ({:.3}%)", 100.0 * vrel)];
    for (name, params) in [("disc", "radius=0.5"), ("rectangle", "hw=0.5,hh=0.5"), ("annulus", ""), ("astroid", "")] {
        let s = ShapeSpec::parse(name, params).unwrap();
        let m = default_mask(&s, 0.0);
        let got = outer_minkowski(&m, &default_eps_list(m.h())).unwrap();
        let truth = s.analytic_length().unwrap();
        let rel = (got / truth - 1.0).abs();
        ok &= rel <= 0.02;
        notes.push(format!("{name} {got:.4}/{truth:.4} ({:+.2}%)", 100.0 * (got / truth - 1.0)));
    }
    Outcome {
        id: 8,
        pass: ok,
        detail: notes.join("; "),
    }
}

fn criterion_9() -> Outcome {
    let disc = ShapeSpec::parse("disc", "radius=1").unwrap();
    let model = DensityModel::uniform(disc.clone()).unwrap();
    let s = sample_uniform(&SampleRequest { shape: disc.clone(), n: 5000, seed: MASTER_SEED + 9 }).unwrap();
    let (pilot, eval) = split_sample(&s).unwrap();
    let b = default_bandwidth(&pilot).unwrap();
    let r = 0.2;
    let fam = default_family(&pilot, r, b).unwrap();
    let (k, _) = level_set_estimate(&eval, 0.2, &fam).unwrap();
    let truth = model.level_set(&fam.grid, 0.2).unwrap();
    let dmu = measure_distance(&fam.candidates[k], &truth).unwrap();
    let lambdas = default_lambda_grid(1.2 * fam.kde_max, DEFAULT_SWEEP_STEPS);
    let step = lambdas[1] - lambdas[0];
    let rep = lambda_sweep(&eval, Some(&model), &fam, &lambdas).unwrap();
    let t = rep.transition_lambda();
    let t_ok = t.is_some_and(|t| (t - 1.0 / PI).abs() <= step);

    let fixed_pilot = sample_uniform(&SampleRequest { shape: disc.clone(), n: 2000, seed: MASTER_SEED + 90 }).unwrap();
    let fb = default_bandwidth(&fixed_pilot).unwrap();
    let fg = family_grid(&fixed_pilot, r, fb, 128).unwrap();
    let thresholds: Vec<f64> = (0..9).map(|k| 0.04 * k as f64).collect();
    let fixed = build_candidate_family(&fixed_pilot, r, &thresholds, fb, &fg).unwrap();
    let big = sample_uniform(&SampleRequest { shape: disc, n: 100_000, seed: MASTER_SEED + 91 }).unwrap();
    let dev = uniform_deviation(&big, &model, &fixed).unwrap();
    Outcome {
        id: 9,
        pass: dmu <= 0.1 * PI && t_ok && fixed.len() == 10 && dev <= 0.01,
        detail: format!(
            "unit disc n=5000 (family on pilot half, scored on the other half): d_mu {dmu:.4} <= {:.4}; transition {t:?} within step {step:.4} of 1/pi; uniform deviation {dev:.5} <= 0.01 over {} candidates at n=1e5",
            0.1 * PI,
            fixed.len()
        ),
    }
}

fn criterion_10(dir: &Path) -> Outcome {
    let mut cfg = config(ExperimentKind::Table1, "astroid", 0.25, &[5000], 100, None, &dir.join("a"));
    run(&cfg).expect("first run");
    cfg.out_dir = dir.join("b");
    run(&cfg).expect("second run");
    let same = |f: &str| std::fs::read(dir.join("a").join(f)).unwrap() == std::fs::read(dir.join("b").join(f)).unwrap();
    let (runs, summary) = (same("runs.csv"), same("summary.csv"));
    Outcome {
        id: 10,
        pass: runs && summary,
        detail: format!("repeated astroid table1 run: runs.csv identical {runs}, summary.csv identical {summary}"),
    }
}

#[test]
fn acceptance_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let mut outcomes = Vec::new();
    let mut record = |o: Outcome| {
        emit(&o);
        outcomes.push(o);
    };
    for o in criterion_1_2(dir.path()) {
        record(o);
    }
    record(criterion_3(dir.path()));
    record(criterion_4(dir.path()));
    record(criterion_5());
    record(criterion_6());
    record(criterion_7());
    record(criterion_8());
    record(criterion_9());
    record(criterion_10(dir.path()));
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

//! Sub-cell boundary reconstruction used by the Minkowski estimators.
//!
//! The indicator of the mask is smoothed with a one-cell Gaussian and the
//! 0.5 level set is traced by marching squares over the cell centers, which
//! gives a polyline that follows the boundary of the rasterized set to well
//! under one cell. Distances to that polyline replace cell-center distances,
//! whose offset from the boundary does not vanish as a fraction of `eps`.

use rayon::prelude::*;

use super::GridMask;

const SIGMA: f64 = 1.0;
const KERNEL_HALF: usize = 3;
const LEVEL: f64 = 0.5;

/// Smoothed indicator, squared unsigned distances (cell units) to the level
/// polyline within `reach` cells, and the inside flag per cell.
pub(crate) struct SubcellField {
    pub dist_sq: Vec<f64>,
    pub inside: Vec<bool>,
}

fn smooth(mask: &GridMask) -> Vec<f64> {
    let (w, h) = (mask.grid.width, mask.grid.height);
    let k: Vec<f64> = {
        let raw: Vec<f64> = (0..=2 * KERNEL_HALF)
            .map(|t| {
                let d = t as f64 - KERNEL_HALF as f64;
                (-d * d / (2.0 * SIGMA * SIGMA)).exp()
            })
            .collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / s).collect()
    };
    let half = KERNEL_HALF as i64;
    let mut tmp = vec![0.0; w * h];
    tmp.par_chunks_mut(w).enumerate().for_each(|(j, row)| {
        for (i, out) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (t, kv) in k.iter().enumerate() {
                let ii = i as i64 + t as i64 - half;
                if ii >= 0 && (ii as usize) < w && mask.cells[j * w + ii as usize] {
                    acc += kv;
                }
            }
            *out = acc;
        }
    });
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(j, row)| {
        for (i, o) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (t, kv) in k.iter().enumerate() {
                let jj = j as i64 + t as i64 - half;
                if jj >= 0 && (jj as usize) < h {
                    acc += kv * tmp[jj as usize * w + i];
                }
            }
            *o = acc;
        }
    });
    out
}

type Seg = [(f64, f64); 2];

fn trace(f: &[f64], w: usize, h: usize) -> Vec<Seg> {
    if w < 2 || h < 2 {
        return Vec::new();
    }
    (0..h - 1)
        .into_par_iter()
        .flat_map_iter(|j| {
            let mut segs = Vec::new();
            for i in 0..w - 1 {
                // Corners counter-clockwise from the lower left.
                let c = [
                    (i as f64, j as f64, f[j * w + i]),
                    ((i + 1) as f64, j as f64, f[j * w + i + 1]),
                    ((i + 1) as f64, (j + 1) as f64, f[(j + 1) * w + i + 1]),
                    (i as f64, (j + 1) as f64, f[(j + 1) * w + i]),
                ];
                let mut pts: Vec<(f64, f64)> = Vec::with_capacity(4);
                for e in 0..4 {
                    let (a, b) = (c[e], c[(e + 1) % 4]);
                    if (a.2 >= LEVEL) != (b.2 >= LEVEL) {
                        let t = (LEVEL - a.2) / (b.2 - a.2);
                        pts.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
                    }
                }
                match pts.len() {
                    2 => segs.push([pts[0], pts[1]]),
                    4 => {
                        // Saddle: the cell mean decides which corners connect.
                        let mean = (c[0].2 + c[1].2 + c[2].2 + c[3].2) / 4.0;
                        if (mean >= LEVEL) == (c[0].2 >= LEVEL) {
                            segs.push([pts[0], pts[1]]);
                            segs.push([pts[2], pts[3]]);
                        } else {
                            segs.push([pts[3], pts[0]]);
                            segs.push([pts[1], pts[2]]);
                        }
                    }
                    _ => {}
                }
            }
            segs
        })
        .collect()
}

fn seg_dist_sq(p: (f64, f64), s: &Seg) -> f64 {
    let (a, b) = (s[0], s[1]);
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let l2 = dx * dx + dy * dy;
    let t = if l2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (qx, qy) = (a.0 + t * dx - p.0, a.1 + t * dy - p.1);
    qx * qx + qy * qy
}

/// Distances are exact for cells within `reach` cells of the polyline and
/// infinite beyond.
pub(crate) fn subcell_field(mask: &GridMask, reach: f64) -> SubcellField {
    let (w, h) = (mask.grid.width, mask.grid.height);
    let f = smooth(mask);
    let inside: Vec<bool> = f.iter().map(|&v| v >= LEVEL).collect();
    let mut segs = trace(&f, w, h);
    segs.sort_by(|a, b| a[0].1.min(a[1].1).total_cmp(&b[0].1.min(b[1].1)));
    let ymins: Vec<f64> = segs.iter().map(|s| s[0].1.min(s[1].1)).collect();
    let reach_c = reach.ceil() as i64 + 1;
    const BAND: usize = 16;
    let mut dist_sq = vec![f64::INFINITY; w * h];
    dist_sq
        .par_chunks_mut(w * BAND)
        .enumerate()
        .for_each(|(b, chunk)| {
            let j0 = b * BAND;
            let rows = chunk.len() / w;
            let ylo = j0 as f64 - reach_c as f64;
            let yhi = (j0 + rows) as f64 + reach_c as f64;
            // Segments have height at most one cell.
            let start = ymins.partition_point(|&y| y < ylo - 1.0);
            for s in segs[start..].iter() {
                let sy0 = s[0].1.min(s[1].1);
                if sy0 > yhi {
                    break;
                }
                let sy1 = s[0].1.max(s[1].1);
                let sx0 = s[0].0.min(s[1].0);
                let sx1 = s[0].0.max(s[1].0);
                let jlo = ((sy0 - reach_c as f64).floor().max(j0 as f64)) as usize;
                let jhi = ((sy1 + reach_c as f64).ceil().min((j0 + rows - 1) as f64)) as i64;
                let ilo = (sx0 - reach_c as f64).floor().max(0.0) as usize;
                let ihi = (sx1 + reach_c as f64).ceil().min((w - 1) as f64) as usize;
                if (jhi as f64) < jlo as f64 {
                    continue;
                }
                for j in jlo..=jhi as usize {
                    let row = &mut chunk[(j - j0) * w..(j - j0 + 1) * w];
                    for (i, cell) in row.iter_mut().enumerate().take(ihi + 1).skip(ilo) {
                        let d = seg_dist_sq((i as f64, j as f64), s);
                        if d < *cell {
                            *cell = d;
                        }
                    }
                }
            }
        });
    SubcellField { dist_sq, inside }
}

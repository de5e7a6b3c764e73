use rayon::prelude::*;

use super::{Grid, GridMask};
use crate::error::{Error, Result};

pub(crate) const NONE: i64 = i64::MAX;

/// Per-cell Euclidean distance to the nearest occupied cell center.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl DistanceField {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.width + i]
    }
}

/// Exact Euclidean distance transform of an occupied-cell set.
pub fn edt(mask: &GridMask) -> Result<DistanceField> {
    if mask.is_empty() {
        return Err(Error::domain("distance transform of an empty mask"));
    }
    let h = mask.grid.h;
    let values = edt_sq(&mask.cells, mask.grid.width, mask.grid.height)
        .into_iter()
        .map(|s| (s as f64).sqrt() * h)
        .collect();
    Ok(DistanceField {
        grid: mask.grid,
        values,
    })
}

/// Squared distances in cell units; `NONE` everywhere when nothing is set.
pub(crate) fn edt_sq(cells: &[bool], w: usize, h: usize) -> Vec<i64> {
    // Column pass: distance to the nearest set cell in the same column.
    let mut col = vec![NONE; w * h];
    let cols: Vec<Vec<i64>> = (0..w)
        .into_par_iter()
        .map(|i| {
            let mut g = vec![NONE; h];
            let mut last: Option<usize> = None;
            for j in 0..h {
                if cells[j * w + i] {
                    last = Some(j);
                }
                if let Some(l) = last {
                    g[j] = (j - l) as i64;
                }
            }
            let mut next: Option<usize> = None;
            for j in (0..h).rev() {
                if cells[j * w + i] {
                    next = Some(j);
                }
                if let Some(n) = next {
                    g[j] = g[j].min((n - j) as i64);
                }
            }
            g
        })
        .collect();
    for (i, g) in cols.into_iter().enumerate() {
        for (j, v) in g.into_iter().enumerate() {
            col[j * w + i] = v;
        }
    }
    // Row pass: lower envelope of the parabolas (x - q)^2 + g(q)^2.
    col.par_chunks_mut(w).for_each(|row| {
        let f: Vec<i64> = row.iter().map(|&g| if g == NONE { NONE } else { g * g }).collect();
        let mut v: Vec<usize> = Vec::with_capacity(w);
        let mut z: Vec<f64> = Vec::with_capacity(w + 1);
        for q in 0..w {
            if f[q] == NONE {
                continue;
            }
            loop {
                match v.last() {
                    None => {
                        v.push(q);
                        z.clear();
                        z.push(f64::NEG_INFINITY);
                        break;
                    }
                    Some(&p) => {
                        let s = ((f[q] + (q * q) as i64) - (f[p] + (p * p) as i64)) as f64
                            / (2.0 * (q as f64 - p as f64));
                        if s <= *z.last().unwrap() {
                            v.pop();
                            z.pop();
                            continue;
                        }
                        v.push(q);
                        z.push(s);
                        break;
                    }
                }
            }
        }
        if v.is_empty() {
            row.iter_mut().for_each(|x| *x = NONE);
            return;
        }
        let mut k = 0;
        for (x, out) in row.iter_mut().enumerate() {
            while k + 1 < v.len() && z[k + 1] < x as f64 {
                k += 1;
            }
            let q = v[k];
            let dx = x as i64 - q as i64;
            let mut best = dx * dx + f[q];
            // Guard against rounding at envelope breakpoints.
            if k + 1 < v.len() {
                let q2 = v[k + 1];
                let dx2 = x as i64 - q2 as i64;
                best = best.min(dx2 * dx2 + f[q2]);
            }
            *out = best;
        }
    });
    col
}

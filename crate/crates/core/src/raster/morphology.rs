use rayon::prelude::*;

use super::edt::{edt_sq, NONE};
use super::GridMask;
use crate::error::{Error, Result};

/// Default band, in cells, tolerated around the boundary by the checks.
pub const DEFAULT_BAND: f64 = 2.0;

fn radius_sq_cells(rho: f64, h: f64) -> f64 {
    let q = rho / h;
    q * q * (1.0 + 1e-12)
}

fn check_radius(rho: f64) -> Result<()> {
    if rho >= 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("morphology radius must be finite and >= 0, got {rho}")))
    }
}

/// Squared distance (cells) from each cell to the nearest empty cell, where
/// everything outside the window counts as empty.
pub(crate) fn complement_sq(mask: &GridMask) -> Vec<i64> {
    let (w, h) = (mask.grid.width, mask.grid.height);
    let inv: Vec<bool> = mask.cells.iter().map(|&c| !c).collect();
    let mut sq = edt_sq(&inv, w, h);
    sq.par_chunks_mut(w).enumerate().for_each(|(j, row)| {
        let dy = (j as i64 + 1).min((h - j) as i64);
        for (i, v) in row.iter_mut().enumerate() {
            let dx = (i as i64 + 1).min((w - i) as i64);
            let d = dx.min(dy);
            *v = (*v).min(d * d);
        }
    });
    sq
}

/// Cells within distance `rho` of an occupied cell center.
pub fn dilate(mask: &GridMask, rho: f64) -> Result<GridMask> {
    check_radius(rho)?;
    mask.require_margin(rho, "dilation")?;
    if mask.is_empty() {
        return Ok(mask.clone());
    }
    let lim = radius_sq_cells(rho, mask.grid.h);
    let sq = edt_sq(&mask.cells, mask.grid.width, mask.grid.height);
    Ok(GridMask {
        grid: mask.grid,
        cells: sq.par_iter().map(|&s| s != NONE && (s as f64) <= lim).collect(),
    })
}

/// Cells farther than `rho` from every empty cell (the complement of the
/// dilated complement).
pub fn erode(mask: &GridMask, rho: f64) -> Result<GridMask> {
    check_radius(rho)?;
    let lim = radius_sq_cells(rho, mask.grid.h);
    let sq = complement_sq(mask);
    Ok(GridMask {
        grid: mask.grid,
        cells: sq.par_iter().map(|&s| (s as f64) > lim).collect(),
    })
}

/// Morphological closing by a radius-`rho` disc.
pub fn closing(mask: &GridMask, rho: f64) -> Result<GridMask> {
    erode(&dilate(mask, rho)?, rho)
}

/// Whether closing at radius `r` changes the mask only within `band` cells
/// of its boundary.
pub fn rconvexity_check(mask: &GridMask, r: f64, band: f64) -> Result<bool> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("radius must be > 0, got {r}")));
    }
    mask.require_margin(r, "r-convexity check")?;
    let closed = closing(mask, r)?;
    let diff = closed.symmetric_difference(mask)?;
    if diff.is_empty() {
        return Ok(true);
    }
    let b = mask.boundary();
    if b.is_empty() {
        return Ok(false);
    }
    let bsq = edt_sq(&b.cells, b.grid.width, b.grid.height);
    let lim = band * band * (1.0 + 1e-12);
    Ok(diff
        .cells
        .par_iter()
        .zip(bsq.par_iter())
        .all(|(&d, &s)| !d || (s as f64) <= lim))
}

/// Outside rolling condition: every boundary cell lies within `r + tol` of
/// a cell whose distance to the mask is at least `r - tol`.
pub fn rolling_check(mask: &GridMask, r: f64, tol: f64) -> Result<bool> {
    if !(r > 0.0) || !(tol >= 0.0) {
        return Err(Error::domain(format!("need r > 0 and tol >= 0, got {r}, {tol}")));
    }
    mask.require_margin(2.0 * r, "rolling check")?;
    let b = mask.boundary();
    if b.is_empty() {
        return Ok(true);
    }
    let h = mask.grid.h;
    let (w, ht) = (mask.grid.width, mask.grid.height);
    let sq = edt_sq(&mask.cells, w, ht);
    let lo = ((r - tol).max(0.0) / h).powi(2) * (1.0 - 1e-12);
    let centers: Vec<bool> = sq.par_iter().map(|&s| s != NONE && s as f64 >= lo).collect();
    if !centers.iter().any(|&c| c) {
        return Ok(false);
    }
    let esq = edt_sq(&centers, w, ht);
    let hi = radius_sq_cells(r + tol, h);
    Ok(b.cells.par_iter().zip(esq.par_iter()).all(|(&bc, &s)| !bc || (s as f64) <= hi))
}

/// Interior local connectivity at radius `alpha`: for every occupied cell
/// x, interior(B(x, alpha) ∩ mask) is nonempty and 4-connected. The interior
/// is taken as the open disc intersected with the 4-interior of the mask
/// (cells whose four neighbours are occupied).
pub fn ilc_check(mask: &GridMask, alpha: f64) -> Result<bool> {
    let h = mask.grid.h;
    if !(alpha > h) {
        return Err(Error::domain(format!("ILC radius {alpha} must exceed the cell size {h}")));
    }
    let rad = (alpha / h).ceil() as i64;
    let open_lim = (alpha / h).powi(2) * (1.0 - 1e-12);
    let side = (2 * rad + 1) as usize;
    let offsets: Vec<(i64, i64)> = (-rad..=rad)
        .flat_map(|dj| (-rad..=rad).map(move |di| (di, dj)))
        .filter(|&(di, dj)| ((di * di + dj * dj) as f64) < open_lim)
        .collect();
    let interior = mask.interior4();
    let far = ((alpha + h) / h).powi(2);
    let csq = complement_sq(mask);
    let w = mask.grid.width;
    let ok = (0..mask.grid.len()).into_par_iter().all(|k| {
        if !mask.cells[k] || csq[k] as f64 > far {
            return true;
        }
        let (ci, cj) = ((k % w) as i64, (k / w) as i64);
        let mut local = vec![false; side * side];
        for &(di, dj) in &offsets {
            if interior.get_signed(ci + di, cj + dj) {
                local[((dj + rad) as usize) * side + (di + rad) as usize] = true;
            }
        }
        connected4(&local, side)
    });
    Ok(ok)
}

/// Whether the set cells of a `side`-square window are nonempty and
/// 4-connected.
fn connected4(cells: &[bool], side: usize) -> bool {
    let total = cells.iter().filter(|&&b| b).count();
    let Some(start) = cells.iter().position(|&b| b) else {
        return false;
    };
    let mut seen = vec![false; side * side];
    let mut stack = vec![start];
    seen[start] = true;
    let mut reached = 0;
    while let Some(k) = stack.pop() {
        reached += 1;
        let (i, j) = (k % side, k / side);
        let mut push = |n: usize| {
            if cells[n] && !seen[n] {
                seen[n] = true;
                stack.push(n);
            }
        };
        if i > 0 {
            push(k - 1);
        }
        if i + 1 < side {
            push(k + 1);
        }
        if j > 0 {
            push(k - side);
        }
        if j + 1 < side {
            push(k + side);
        }
    }
    reached == total
}

use rayon::prelude::*;

use super::edt::edt_sq;
use super::contour::subcell_field;
use super::morphology::dilate;
use super::{require_same, GridMask};
use crate::error::{Error, Result};

/// `{3h * 2^k : k = 0..4}`.
pub fn default_eps_list(h: f64) -> Vec<f64> {
    (0..5).map(|k| 3.0 * h * f64::powi(2.0, k)).collect()
}

/// Area of the closed `eps`-parallel set.
pub fn parallel_volume(mask: &GridMask, eps: f64) -> Result<f64> {
    Ok(dilate(mask, eps)?.area())
}

fn check_eps(mask: &GridMask, eps: &[f64]) -> Result<()> {
    if eps.len() < 2 {
        return Err(Error::domain(format!("need at least 2 epsilon values, got {}", eps.len())));
    }
    let h = mask.grid.h;
    if eps.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("epsilon list must be strictly increasing"));
    }
    if eps[0] < 3.0 * h * (1.0 - 1e-12) {
        return Err(Error::domain(format!("epsilon {} is below 3h = {}", eps[0], 3.0 * h)));
    }
    Ok(())
}

/// Intercept of the least-squares line through `(x, y)`.
fn intercept(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    my - sxy / sxx * mx
}

/// `lambda(eps)` for both estimators: cells within `eps` of the sub-cell
/// boundary, outside it (outer) or on either side (two-sided).
fn tube_counts(mask: &GridMask, eps: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_eps(mask, eps)?;
    let emax = *eps.last().unwrap();
    mask.require_margin(emax, "Minkowski content")?;
    let h = mask.grid.h;
    let field = subcell_field(mask, emax / h);
    let lims: Vec<f64> = eps.iter().map(|e| (e / h).powi(2) * (1.0 + 1e-12)).collect();
    let (outer, both) = field
        .dist_sq
        .par_iter()
        .zip(field.inside.par_iter())
        .fold(
            || (vec![0usize; eps.len()], vec![0usize; eps.len()]),
            |(mut o, mut t), (&d, &inside)| {
                for (k, &lim) in lims.iter().enumerate() {
                    if d <= lim {
                        t[k] += 1;
                        if !inside {
                            o[k] += 1;
                        }
                    }
                }
                (o, t)
            },
        )
        .reduce(
            || (vec![0usize; eps.len()], vec![0usize; eps.len()]),
            |(mut o, mut t), (o2, t2)| {
                o.iter_mut().zip(o2).for_each(|(a, b)| *a += b);
                t.iter_mut().zip(t2).for_each(|(a, b)| *a += b);
                (o, t)
            },
        );
    let cell = h * h;
    let lo = eps.iter().zip(&outer).map(|(e, &c)| c as f64 * cell / e).collect();
    let lt = eps.iter().zip(&both).map(|(e, &c)| c as f64 * cell / (2.0 * e)).collect();
    Ok((lo, lt))
}

/// Outer Minkowski content: `(|A + eps B| - |A|) / eps` extrapolated
/// linearly to `eps = 0`. Parallel sets are measured from the sub-cell
/// boundary of the mask rather than from occupied cell centers.
pub fn outer_minkowski(mask: &GridMask, eps: &[f64]) -> Result<f64> {
    let (lam, _) = tube_counts(mask, eps)?;
    Ok(intercept(eps, &lam))
}

/// Two-sided Minkowski content: area of the `eps`-tube around the boundary
/// over `2 eps`, extrapolated linearly to `eps = 0`.
pub fn two_sided_minkowski(mask: &GridMask, eps: &[f64]) -> Result<f64> {
    let (_, lam) = tube_counts(mask, eps)?;
    Ok(intercept(eps, &lam))
}

/// `h^2 |A Δ B|`.
pub fn measure_distance(a: &GridMask, b: &GridMask) -> Result<f64> {
    Ok(a.symmetric_difference(b)?.area())
}

fn directed_sq(from: &GridMask, to_sq: &[i64]) -> i64 {
    from.cells
        .par_iter()
        .zip(to_sq.par_iter())
        .filter(|(&c, _)| c)
        .map(|(_, &s)| s)
        .max()
        .unwrap_or(0)
}

/// Hausdorff distance between the occupied cell centers of two masks.
pub fn hausdorff_masks(a: &GridMask, b: &GridMask) -> Result<f64> {
    require_same(a, b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("Hausdorff distance with an empty mask"));
    }
    let (w, h) = (a.grid.width, a.grid.height);
    let sa = edt_sq(&a.cells, w, h);
    let sb = edt_sq(&b.cells, w, h);
    let m = directed_sq(a, &sb).max(directed_sq(b, &sa));
    Ok((m as f64).sqrt() * a.grid.h)
}

/// Hausdorff distance between the boundaries of two masks.
pub fn hausdorff_boundaries(a: &GridMask, b: &GridMask) -> Result<f64> {
    require_same(a, b)?;
    let (ba, bb) = (a.boundary(), b.boundary());
    if ba.is_empty() || bb.is_empty() {
        return Err(Error::domain("Hausdorff distance of boundaries with an empty boundary"));
    }
    hausdorff_masks(&ba, &bb)
}

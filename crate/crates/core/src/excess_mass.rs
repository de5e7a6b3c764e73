//! Excess-mass functionals `H(A) = P(A) - lambda mu(A)` and a level-set
//! estimator that maximizes the empirical functional over a finite family
//! of closed kernel-density upper-level sets.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{BBox, Point2, PointSet};
use crate::raster::{closing, measure_distance, Grid, GridMask};
use crate::shapes::ShapeSpec;

/// Kernel support radius in bandwidths.
pub const KERNEL_CUTOFF: f64 = 4.0;
/// Sub-grid size for cells that straddle a density jump.
const SUPERSAMPLE: usize = 4;
/// Default number of cells across the family grid.
pub const DEFAULT_FAMILY_CELLS: usize = 256;
/// Default sweep size.
pub const DEFAULT_SWEEP_STEPS: usize = 20;
/// Number of KDE thresholds in `default_family`.
pub const DEFAULT_THRESHOLD_STEPS: usize = 20;

/// Note written at the top of every report.
pub const REPORT_NOTE: &str = "argmax over a finite surrogate family (radius-r closings of KDE upper-level sets plus the empty set), not over all sets with reach >= r";

/// Mixture of uniform densities on shapes.
#[derive(Clone, Debug)]
pub struct DensityModel {
    components: Vec<(ShapeSpec, f64, f64)>,
}

impl DensityModel {
    pub fn uniform(shape: ShapeSpec) -> Result<Self> {
        DensityModel::mixture(vec![(shape, 1.0)])
    }

    /// Weights must be positive and sum to 1; every shape needs a known area.
    pub fn mixture(parts: Vec<(ShapeSpec, f64)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::domain("density model needs at least one component"));
        }
        let total: f64 = parts.iter().map(|p| p.1).sum();
        if parts.iter().any(|p| !(p.1 > 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!("mixture weights must be positive and sum to 1, got sum {total}")));
        }
        let components = parts
            .into_iter()
            .map(|(s, w)| {
                let area = s
                    .analytic_area()
                    .ok_or_else(|| Error::domain(format!("shape {} has no known area", s.name())))?;
                Ok((s, w, area))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DensityModel { components })
    }

    pub fn density(&self, p: Point2) -> f64 {
        self.components
            .iter()
            .filter(|c| c.0.contains(p))
            .map(|c| c.1 / c.2)
            .sum()
    }

    pub fn support_bbox(&self) -> BBox {
        self.components
            .iter()
            .map(|c| c.0.bounding_box)
            .reduce(|a, b| a.union(&b))
            .unwrap()
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        let deficit = grid.bbox().overhang(&self.support_bbox());
        if deficit > 1e-12 * grid.bbox().diagonal() {
            return Err(Error::GridMismatch(format!(
                "grid does not cover the model support (short by {deficit})"
            )));
        }
        Ok(())
    }

    /// Model probability of each cell. Cells whose center and corners agree
    /// use the center density; others average a 4x4 sub-grid.
    pub fn cell_probabilities(&self, grid: &Grid) -> Result<Vec<f64>> {
        self.check_grid(grid)?;
        let (w, h) = (grid.width, grid.h);
        Ok((0..grid.len())
            .into_par_iter()
            .map(|k| {
                let c = grid.center(k % w, k / w);
                let f = self.density(c);
                let uniform = [(-0.5, -0.5), (0.5, -0.5), (-0.5, 0.5), (0.5, 0.5)]
                    .iter()
                    .all(|&(dx, dy)| self.density(Point2::new(c.x + dx * h, c.y + dy * h)) == f);
                if uniform {
                    return f * h * h;
                }
                let mut sum = 0.0;
                for a in 0..SUPERSAMPLE {
                    for b in 0..SUPERSAMPLE {
                        let dx = (a as f64 + 0.5) / SUPERSAMPLE as f64 - 0.5;
                        let dy = (b as f64 + 0.5) / SUPERSAMPLE as f64 - 0.5;
                        sum += self.density(Point2::new(c.x + dx * h, c.y + dy * h));
                    }
                }
                sum * h * h / (SUPERSAMPLE * SUPERSAMPLE) as f64
            })
            .collect())
    }

    pub fn probability(&self, mask: &GridMask) -> Result<f64> {
        let p = self.cell_probabilities(&mask.grid)?;
        Ok(masked_sum(mask, &p))
    }

    /// `{f >= lambda}` within the support, on `grid`.
    pub fn level_set(&self, grid: &Grid, lambda: f64) -> Result<GridMask> {
        self.check_grid(grid)?;
        Ok(GridMask::from_fn(*grid, |i, j| {
            let f = self.density(grid.center(i, j));
            f > 0.0 && f >= lambda
        }))
    }
}

fn masked_sum(mask: &GridMask, v: &[f64]) -> f64 {
    mask.cells.iter().zip(v).filter(|(&c, _)| c).map(|(_, &p)| p).sum()
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("lambda must be finite and >= 0, got {lambda}")))
    }
}

/// `H_lambda(A) = P(A) - lambda mu(A)` under the model.
pub fn excess_mass_model(model: &DensityModel, a: &GridMask, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(model.probability(a)? - lambda * a.area())
}

/// `H_{n,lambda}(A) = P_n(A) - lambda mu(A)`, counting points in occupied
/// cells.
pub fn empirical_excess_mass(sample: &PointSet, a: &GridMask, lambda: f64) -> f64 {
    empirical_probability(sample, a) - lambda * a.area()
}

fn empirical_probability(sample: &PointSet, a: &GridMask) -> f64 {
    if sample.is_empty() {
        return 0.0;
    }
    let hits = sample
        .iter()
        .filter(|&p| a.grid.cell_of(p).is_some_and(|(i, j)| a.get(i, j)))
        .count();
    hits as f64 / sample.len() as f64
}

/// Rule-of-thumb bandwidth `n^(-1/6) * sqrt((var_x + var_y) / 2)`.
pub fn default_bandwidth(sample: &PointSet) -> Result<f64> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::domain("automatic bandwidth needs at least 2 points"));
    }
    let nf = n as f64;
    let (mx, my) = sample.iter().fold((0.0, 0.0), |a, p| (a.0 + p.x / nf, a.1 + p.y / nf));
    let (vx, vy) = sample
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + (p.x - mx).powi(2), a.1 + (p.y - my).powi(2)));
    let sd = ((vx + vy) / (2.0 * (nf - 1.0))).sqrt();
    let b = nf.powf(-1.0 / 6.0) * sd;
    if !(b > 0.0) {
        return Err(Error::domain("sample has zero spread; bandwidth would be 0"));
    }
    Ok(b)
}

/// Grid of about `cells` cells across that holds the kernel support of the
/// sample plus room for a radius-`r` closing.
pub fn family_grid(sample: &PointSet, r: f64, bandwidth: f64, cells: usize) -> Result<Grid> {
    let b = sample.bbox().ok_or_else(|| Error::domain("empty sample"))?;
    let pad = KERNEL_CUTOFF * bandwidth + r;
    let cells = cells.max(16);
    let outer = b.expand(pad);
    let h = outer.width().max(outer.height()) / (cells - 4) as f64;
    Grid::covering(b, pad + 2.0 * h, h)
}

/// Gaussian kernel density estimate at every cell center, truncated at
/// `KERNEL_CUTOFF` bandwidths.
pub fn kde(sample: &PointSet, bandwidth: f64, grid: &Grid) -> Result<Vec<f64>> {
    if !(bandwidth > 0.0) || !bandwidth.is_finite() {
        return Err(Error::domain(format!("bandwidth must be > 0, got {bandwidth}")));
    }
    let mut pts: Vec<Point2> = sample.points().to_vec();
    pts.sort_by(|a, b| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)));
    let ys: Vec<f64> = pts.iter().map(|p| p.y).collect();
    let cut = KERNEL_CUTOFF * bandwidth;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * bandwidth * bandwidth * pts.len().max(1) as f64);
    let inv = 1.0 / (2.0 * bandwidth * bandwidth);
    let (w, h) = (grid.width, grid.h);
    let x0 = grid.origin.x + 0.5 * h;
    let mut out = vec![0.0; grid.len()];
    out.par_chunks_mut(w).enumerate().for_each(|(j, row)| {
        let y = grid.center(0, j).y;
        let lo = ys.partition_point(|&v| v < y - cut);
        let hi = ys.partition_point(|&v| v <= y + cut);
        for p in &pts[lo..hi] {
            let dy = y - p.y;
            let rx2 = cut * cut - dy * dy;
            if rx2 < 0.0 {
                continue;
            }
            let rx = rx2.sqrt();
            let gy = (-dy * dy * inv).exp();
            let ilo = (((p.x - rx - x0) / h).ceil().max(0.0)) as usize;
            let ihi = ((p.x + rx - x0) / h).floor();
            if ihi < 0.0 {
                continue;
            }
            let ihi = (ihi as usize).min(w - 1);
            for (i, v) in row.iter_mut().enumerate().take(ihi + 1).skip(ilo) {
                let dx = x0 + i as f64 * h - p.x;
                *v += gy * (-dx * dx * inv).exp();
            }
        }
        row.iter_mut().for_each(|v| *v *= norm);
    });
    Ok(out)
}

/// How a candidate was generated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateOrigin {
    /// KDE threshold; `None` for the appended empty set.
    pub threshold: Option<f64>,
    pub radius: f64,
}

#[derive(Clone, Debug)]
pub struct CandidateFamily {
    pub grid: Grid,
    pub candidates: Vec<GridMask>,
    pub origins: Vec<CandidateOrigin>,
    /// Largest KDE value seen while building the family.
    pub kde_max: f64,
}

impl CandidateFamily {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Adds a mask on the family grid (for example a model level set).
    pub fn push(&mut self, mask: GridMask, origin: CandidateOrigin) -> Result<usize> {
        if !mask.grid.same_as(&self.grid) {
            return Err(Error::GridMismatch("candidate is not on the family grid".into()));
        }
        self.candidates.push(mask);
        self.origins.push(origin);
        Ok(self.candidates.len() - 1)
    }
}

/// Radius-`r` closings of `{kde >= t} ∩ {kde > 0}` for each threshold, then
/// the empty mask. `r = 0` skips the closing.
pub fn build_candidate_family(
    sample: &PointSet,
    r: f64,
    thresholds: &[f64],
    bandwidth: f64,
    grid: &Grid,
) -> Result<CandidateFamily> {
    check_radius(r)?;
    if thresholds.windows(2).any(|w| !(w[0] <= w[1])) || thresholds.iter().any(|t| !t.is_finite()) {
        return Err(Error::domain("thresholds must be finite and sorted ascending"));
    }
    let f = kde(sample, bandwidth, grid)?;
    family_from_kde(&f, grid, r, thresholds)
}

/// Family on `family_grid(sample, r, bandwidth, DEFAULT_FAMILY_CELLS)` with
/// thresholds `k / DEFAULT_THRESHOLD_STEPS * max KDE`, `k = 0..DEFAULT_THRESHOLD_STEPS`.
pub fn default_family(sample: &PointSet, r: f64, bandwidth: f64) -> Result<CandidateFamily> {
    check_radius(r)?;
    let grid = family_grid(sample, r, bandwidth, DEFAULT_FAMILY_CELLS)?;
    let f = kde(sample, bandwidth, &grid)?;
    let top = f.iter().copied().fold(0.0, f64::max);
    let steps = DEFAULT_THRESHOLD_STEPS;
    let thresholds: Vec<f64> = (0..steps).map(|k| top * k as f64 / steps as f64).collect();
    family_from_kde(&f, &grid, r, &thresholds)
}

fn check_radius(r: f64) -> Result<()> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("closing radius must be finite and >= 0, got {r}")));
    }
    Ok(())
}

fn family_from_kde(f: &[f64], grid: &Grid, r: f64, thresholds: &[f64]) -> Result<CandidateFamily> {
    let kde_max = f.iter().copied().fold(0.0, f64::max);
    let mut candidates = Vec::with_capacity(thresholds.len() + 1);
    let mut origins = Vec::with_capacity(thresholds.len() + 1);
    for &t in thresholds {
        let raw = GridMask {
            grid: *grid,
            cells: f.iter().map(|&v| v > 0.0 && v >= t).collect(),
        };
        let m = if r > 0.0 && !raw.is_empty() { closing(&raw, r)? } else { raw };
        candidates.push(m);
        origins.push(CandidateOrigin { threshold: Some(t), radius: r });
    }
    candidates.push(GridMask::empty(*grid));
    origins.push(CandidateOrigin { threshold: None, radius: r });
    Ok(CandidateFamily {
        grid: *grid,
        candidates,
        origins,
        kde_max,
    })
}

/// Splits a sample into a pilot half (even rows) that builds the family and
/// an evaluation half (odd rows) that scores it. Scoring on the same points
/// that shaped the KDE inflates `P_n(A) / |A|` for small high-level candidates.
pub fn split_sample(sample: &PointSet) -> Result<(PointSet, PointSet)> {
    if sample.len() < 4 {
        return Err(Error::domain("sample split needs at least 4 points"));
    }
    let (even, odd): (Vec<(usize, &Point2)>, Vec<(usize, &Point2)>) =
        sample.points().iter().enumerate().partition(|(i, _)| i % 2 == 0);
    let pilot = PointSet::new(even.into_iter().map(|(_, p)| *p).collect())?;
    let eval = PointSet::new(odd.into_iter().map(|(_, p)| *p).collect())?;
    Ok((pilot, eval))
}

/// Per-candidate empirical probabilities and areas.
fn candidate_stats(sample: &PointSet, family: &CandidateFamily) -> (Vec<f64>, Vec<f64>) {
    let cells: Vec<Option<usize>> = sample
        .iter()
        .map(|p| family.grid.cell_of(p).map(|(i, j)| j * family.grid.width + i))
        .collect();
    let n = sample.len().max(1) as f64;
    family
        .candidates
        .par_iter()
        .map(|m| {
            let hits = cells.iter().filter(|c| c.is_some_and(|k| m.cells[k])).count();
            (hits as f64 / n, m.area())
        })
        .unzip()
}

fn argmax(values: &[f64], areas: &[f64]) -> usize {
    let mut best = 0;
    for k in 1..values.len() {
        let (v, b) = (values[k], values[best]);
        let tie = (v - b).abs() <= 1e-12 * (1.0 + b.abs());
        if (!tie && v > b) || (tie && areas[k] < areas[best]) {
            best = k;
        }
    }
    best
}

/// Candidate maximizing `H_{n,lambda}`, ties going to the smaller area and
/// then the lower id. Returns the candidate id and its value.
pub fn level_set_estimate(sample: &PointSet, lambda: f64, family: &CandidateFamily) -> Result<(usize, f64)> {
    check_lambda(lambda)?;
    if family.is_empty() {
        return Err(Error::domain("candidate family is empty"));
    }
    let (pn, area) = candidate_stats(sample, family);
    let h: Vec<f64> = pn.iter().zip(&area).map(|(p, a)| p - lambda * a).collect();
    let k = argmax(&h, &area);
    Ok((k, h[k]))
}

/// `max_A |P_n(A) - P(A)|` over the family.
pub fn uniform_deviation(sample: &PointSet, model: &DensityModel, family: &CandidateFamily) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::domain("candidate family is empty"));
    }
    let p = model.cell_probabilities(&family.grid)?;
    let (pn, _) = candidate_stats(sample, family);
    Ok(family
        .candidates
        .iter()
        .zip(&pn)
        .map(|(m, &e)| (e - masked_sum(m, &p)).abs())
        .fold(0.0, f64::max))
}

/// `steps` equally spaced values in `(0, hi]`.
pub fn default_lambda_grid(hi: f64, steps: usize) -> Vec<f64> {
    (1..=steps).map(|k| hi * k as f64 / steps as f64).collect()
}

/// Parses `a:b:steps` into `steps` equally spaced values from `a` to `b`.
pub fn parse_lambda_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::domain(format!("lambda grid `{s}` is not of the form a:b:steps"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !(a >= 0.0) || !(b >= a) || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect())
}

/// One sweep row.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub candidate_id: usize,
    pub h_emp: f64,
    /// Model quantities; `None` when no model was supplied.
    pub h_model: Option<f64>,
    pub d_mu: Option<f64>,
    pub sup_dev: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExcessMassReport {
    pub rows: Vec<SweepRow>,
    /// Total `h^2 |A|` of every candidate, by id.
    pub candidate_areas: Vec<f64>,
    /// Empirical excess mass of every candidate at every lambda, by row.
    pub h_emp_all: Vec<Vec<f64>>,
}

impl ExcessMassReport {
    pub fn max_d_mu(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.d_mu).try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))
    }

    /// First lambda of the sweep at which the chosen candidate is empty.
    pub fn transition_lambda(&self) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| self.candidate_areas[r.candidate_id] == 0.0)
            .map(|r| r.lambda)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = Vec::new();
        writeln!(out, "# {REPORT_NOTE}").unwrap();
        writeln!(out, "lambda,candidate_id,h_emp,h_model,d_mu,sup_dev").unwrap();
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v}"));
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.lambda,
                r.candidate_id,
                r.h_emp,
                opt(r.h_model),
                opt(r.d_mu),
                opt(r.sup_dev)
            )
            .unwrap();
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

/// Argmax and error metrics for each lambda of a non-empty grid, in the
/// grid's order.
pub fn lambda_sweep(
    sample: &PointSet,
    model: Option<&DensityModel>,
    family: &CandidateFamily,
    lambdas: &[f64],
) -> Result<ExcessMassReport> {
    if lambdas.is_empty() {
        return Err(Error::domain("lambda grid is empty"));
    }
    if family.is_empty() {
        return Err(Error::domain("candidate family is empty"));
    }
    for &l in lambdas {
        check_lambda(l)?;
    }
    let (pn, area) = candidate_stats(sample, family);
    let model_side = match model {
        Some(m) => {
            let p = m.cell_probabilities(&family.grid)?;
            let probs: Vec<f64> = family.candidates.iter().map(|c| masked_sum(c, &p)).collect();
            let dev = probs.iter().zip(&pn).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            Some((m, probs, dev))
        }
        None => None,
    };
    let per: Vec<(SweepRow, Vec<f64>)> = lambdas
        .par_iter()
        .map(|&l| {
            let h: Vec<f64> = pn.iter().zip(&area).map(|(p, a)| p - l * a).collect();
            let k = argmax(&h, &area);
            let (h_model, d_mu, sup_dev) = match &model_side {
                Some((m, probs, dev)) => {
                    let truth = m.level_set(&family.grid, l)?;
                    (
                        Some(probs[k] - l * area[k]),
                        Some(measure_distance(&family.candidates[k], &truth)?),
                        Some(*dev),
                    )
                }
                None => (None, None, None),
            };
            Ok((
                SweepRow {
                    lambda: l,
                    candidate_id: k,
                    h_emp: h[k],
                    h_model,
                    d_mu,
                    sup_dev,
                },
                h,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let (rows, h_emp_all) = per.into_iter().unzip();
    Ok(ExcessMassReport {
        rows,
        candidate_areas: area,
        h_emp_all,
    })
}

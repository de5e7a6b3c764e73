//! Binary rasters: rasterization of regions, exact Euclidean distance
//! transforms, disc morphology, shape-condition checks, Minkowski contents
//! and set distances.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{BBox, Point2};
use crate::hull::RConvexHull;

mod contour;
mod edt;
mod metrics;
mod morphology;
mod pbm;

pub use edt::{edt, DistanceField};
pub use metrics::{
    default_eps_list, hausdorff_boundaries, hausdorff_masks, measure_distance, outer_minkowski,
    parallel_volume, two_sided_minkowski,
};
pub use morphology::{closing, dilate, erode, ilc_check, rconvexity_check, rolling_check, DEFAULT_BAND};
pub use pbm::{read_pbm, write_pbm};

/// Default number of cells across the longer side of a window.
pub const DEFAULT_WIDTH: usize = 2048;

/// Window header: lower-left corner, square cell size and cell counts.
/// Cell `(i, j)` has center `origin + ((i + 1/2) h, (j + 1/2) h)`; row 0 is
/// the bottom row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub origin: Point2,
    pub h: f64,
    pub width: usize,
    pub height: usize,
}

impl Grid {
    pub fn new(origin: Point2, h: f64, width: usize, height: usize) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::domain(format!("cell size must be > 0, got {h}")));
        }
        if width == 0 || height == 0 {
            return Err(Error::domain("grid must have at least one cell"));
        }
        if !origin.is_finite() {
            return Err(Error::domain("grid origin must be finite"));
        }
        Ok(Grid { origin, h, width, height })
    }

    /// Smallest grid of cell size `h` covering `bbox` grown by `margin`,
    /// centered on the box.
    pub fn covering(bbox: BBox, margin: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::domain(format!("cell size must be > 0, got {h}")));
        }
        let b = bbox.expand(margin);
        let width = ((b.width() / h).ceil() as usize).max(1);
        let height = ((b.height() / h).ceil() as usize).max(1);
        let c = b.center();
        let origin = Point2::new(c.x - 0.5 * width as f64 * h, c.y - 0.5 * height as f64 * h);
        Grid::new(origin, h, width, height)
    }

    /// Grid covering `bbox` plus `margin` with `cells` cells across the
    /// longer side.
    pub fn with_width(bbox: BBox, margin: f64, cells: usize) -> Result<Self> {
        let b = bbox.expand(margin);
        let h = b.width().max(b.height()) / cells.max(1) as f64;
        Grid::covering(bbox, margin, h * (1.0 + 1e-12))
    }

    /// Grid at the default resolution `h = diagonal / 2048`.
    pub fn default_for(bbox: BBox, margin: f64) -> Result<Self> {
        Grid::covering(bbox, margin, bbox.diagonal() / DEFAULT_WIDTH as f64)
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn center(&self, i: usize, j: usize) -> Point2 {
        Point2::new(
            self.origin.x + (i as f64 + 0.5) * self.h,
            self.origin.y + (j as f64 + 0.5) * self.h,
        )
    }

    /// Cell containing `p`, if inside the window.
    pub fn cell_of(&self, p: Point2) -> Option<(usize, usize)> {
        let i = ((p.x - self.origin.x) / self.h).floor();
        let j = ((p.y - self.origin.y) / self.h).floor();
        if i >= 0.0 && j >= 0.0 && (i as usize) < self.width && (j as usize) < self.height {
            Some((i as usize, j as usize))
        } else {
            None
        }
    }

    pub fn bbox(&self) -> BBox {
        BBox::new(
            self.origin,
            Point2::new(
                self.origin.x + self.width as f64 * self.h,
                self.origin.y + self.height as f64 * self.h,
            ),
        )
    }

    pub(crate) fn same_as(&self, o: &Grid) -> bool {
        self == o
    }
}

/// A rasterized subset of a window: a cell is occupied iff its center is in
/// the set.
#[derive(Clone, Debug, PartialEq)]
pub struct GridMask {
    pub grid: Grid,
    pub cells: Vec<bool>,
}

impl GridMask {
    pub fn empty(grid: Grid) -> Self {
        GridMask {
            cells: vec![false; grid.len()],
            grid,
        }
    }

    pub fn full(grid: Grid) -> Self {
        GridMask {
            cells: vec![true; grid.len()],
            grid,
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(usize, usize) -> bool + Sync) -> Self {
        let w = grid.width;
        let cells = (0..grid.len()).into_par_iter().map(|k| f(k % w, k / w)).collect();
        GridMask { grid, cells }
    }

    pub fn width(&self) -> usize {
        self.grid.width
    }

    pub fn height(&self) -> usize {
        self.grid.height
    }

    pub fn h(&self) -> f64 {
        self.grid.h
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[j * self.grid.width + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = self.grid.width;
        self.cells[j * w + i] = v;
    }

    /// Occupancy with cells outside the window reading as empty.
    pub fn get_signed(&self, i: i64, j: i64) -> bool {
        i >= 0
            && j >= 0
            && (i as usize) < self.grid.width
            && (j as usize) < self.grid.height
            && self.get(i as usize, j as usize)
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.cells.iter().any(|&c| c)
    }

    /// `h^2` times the occupied count.
    pub fn area(&self) -> f64 {
        self.count() as f64 * self.grid.h * self.grid.h
    }

    /// Distance from the occupied cell centers to the window edge (infinite
    /// for an empty mask).
    pub fn margin(&self) -> f64 {
        let (w, hgt) = (self.grid.width, self.grid.height);
        let mut m = f64::INFINITY;
        for j in 0..hgt {
            let row = &self.cells[j * w..(j + 1) * w];
            let Some(first) = row.iter().position(|&c| c) else { continue };
            let last = row.iter().rposition(|&c| c).unwrap();
            let cand = (first.min(w - 1 - last)).min(j.min(hgt - 1 - j)) as f64 + 0.5;
            m = m.min(cand);
        }
        m * self.grid.h
    }

    pub(crate) fn require_margin(&self, need: f64, what: &str) -> Result<()> {
        let m = self.margin();
        if m + 1e-9 * self.grid.h < need {
            return Err(Error::domain(format!(
                "{what} needs a window margin of {need}, mask has {m} (deficit {})",
                need - m
            )));
        }
        Ok(())
    }

    pub fn complement(&self) -> GridMask {
        GridMask {
            grid: self.grid,
            cells: self.cells.iter().map(|&c| !c).collect(),
        }
    }

    fn zip(&self, o: &GridMask, f: impl Fn(bool, bool) -> bool) -> Result<GridMask> {
        require_same(self, o)?;
        Ok(GridMask {
            grid: self.grid,
            cells: self.cells.iter().zip(&o.cells).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn union(&self, o: &GridMask) -> Result<GridMask> {
        self.zip(o, |a, b| a || b)
    }

    pub fn intersection(&self, o: &GridMask) -> Result<GridMask> {
        self.zip(o, |a, b| a && b)
    }

    pub fn difference(&self, o: &GridMask) -> Result<GridMask> {
        self.zip(o, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, o: &GridMask) -> Result<GridMask> {
        self.zip(o, |a, b| a != b)
    }

    /// Whether every occupied cell of `self` is occupied in `o`.
    pub fn is_subset(&self, o: &GridMask) -> Result<bool> {
        require_same(self, o)?;
        Ok(self.cells.iter().zip(&o.cells).all(|(&a, &b)| !a || b))
    }

    /// Occupied cells with a 4-neighbor that is empty or outside the window.
    pub fn boundary(&self) -> GridMask {
        let w = self.grid.width;
        let cells = (0..self.grid.len())
            .into_par_iter()
            .map(|k| {
                let (i, j) = ((k % w) as i64, (k / w) as i64);
                self.cells[k]
                    && !(self.get_signed(i - 1, j)
                        && self.get_signed(i + 1, j)
                        && self.get_signed(i, j - 1)
                        && self.get_signed(i, j + 1))
            })
            .collect();
        GridMask { grid: self.grid, cells }
    }

    /// Occupied cells whose four neighbors are all occupied.
    pub fn interior4(&self) -> GridMask {
        self.difference(&self.boundary()).expect("same grid")
    }

    /// 4-connected component labels (`usize::MAX` for empty cells) and the
    /// number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let (w, h) = (self.grid.width, self.grid.height);
        let mut label = vec![usize::MAX; self.grid.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.grid.len() {
            if !self.cells[s] || label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(k) = stack.pop() {
                let (i, j) = (k % w, k / w);
                let mut visit = |n: usize| {
                    if self.cells[n] && label[n] == usize::MAX {
                        label[n] = count;
                        stack.push(n);
                    }
                };
                if i > 0 {
                    visit(k - 1);
                }
                if i + 1 < w {
                    visit(k + 1);
                }
                if j > 0 {
                    visit(k - w);
                }
                if j + 1 < h {
                    visit(k + w);
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn component_count(&self) -> usize {
        self.components().1
    }

    /// Centers of the occupied cells.
    pub fn occupied_centers(&self) -> Vec<Point2> {
        let w = self.grid.width;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(k, _)| self.grid.center(k % w, k / w))
            .collect()
    }
}

pub(crate) fn require_same(a: &GridMask, b: &GridMask) -> Result<()> {
    if a.grid.same_as(&b.grid) {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!("{:?} vs {:?}", a.grid, b.grid)))
    }
}

/// A planar region that can be rasterized.
pub trait Region: Sync {
    fn contains(&self, p: Point2) -> bool;

    fn bounding_box(&self) -> BBox;

    /// Boundary crossings of the line at height `y`, as `(x, direction)`
    /// sorted by `x`, when the region can supply them; a point is inside iff
    /// the directions to its right sum to nonzero.
    fn row_crossings(&self, _y: f64) -> Option<Vec<(f64, i32)>> {
        None
    }
}

impl Region for RConvexHull {
    fn contains(&self, p: Point2) -> bool {
        RConvexHull::contains(self, p)
    }

    fn bounding_box(&self) -> BBox {
        RConvexHull::bounding_box(self)
    }

    fn row_crossings(&self, y: f64) -> Option<Vec<(f64, i32)>> {
        Some(RConvexHull::row_crossings(self, y))
    }
}

/// Occupies every cell whose center lies in `region`. The window must hold
/// the region's bounding box plus `margin` on every side.
pub fn rasterize<R: Region + ?Sized>(region: &R, grid: &Grid, margin: f64) -> Result<GridMask> {
    let need = region.bounding_box().expand(margin);
    let deficit = grid.bbox().overhang(&need);
    if deficit > 1e-12 * need.diagonal().max(grid.h) {
        return Err(Error::domain(format!(
            "window {:?} too small for the region plus margin {margin}: deficit {deficit}",
            grid.bbox()
        )));
    }
    let w = grid.width;
    let rows: Vec<Vec<bool>> = (0..grid.height)
        .into_par_iter()
        .map(|j| {
            let y = grid.center(0, j).y;
            match region.row_crossings(y) {
                Some(cr) => {
                    let mut wind: i32 = cr.iter().map(|c| c.1).sum();
                    let mut k = 0;
                    (0..w)
                        .map(|i| {
                            let x = grid.center(i, j).x;
                            while k < cr.len() && cr[k].0 <= x {
                                wind -= cr[k].1;
                                k += 1;
                            }
                            wind != 0
                        })
                        .collect()
                }
                None => (0..w).map(|i| region.contains(grid.center(i, j))).collect(),
            }
        })
        .collect();
    Ok(GridMask {
        grid: *grid,
        cells: rows.concat(),
    })
}

#[cfg(test)]
mod tests;

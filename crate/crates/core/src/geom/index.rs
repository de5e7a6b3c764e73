use super::{BBox, Point2};

/// Uniform bucket grid over a fixed point list, stored in CSR form.
#[derive(Clone, Debug)]
pub struct PointIndex {
    points: Vec<Point2>,
    origin: Point2,
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl PointIndex {
    pub fn new(points: &[Point2]) -> Self {
        let bbox = BBox::of_points(points).unwrap_or(BBox::new(Point2::default(), Point2::default()));
        let n = points.len().max(1) as f64;
        let w = bbox.width();
        let h = bbox.height();
        let mut cell = 1.5 * (w.max(1e-300) * h.max(1e-300) / n).sqrt();
        let span = w.max(h);
        // Degenerate (collinear or tiny) boxes: fall back on the long side.
        if !(cell > span / (4.0 * n)) || !cell.is_finite() {
            cell = span / n.sqrt().max(1.0);
        }
        if !(cell > 0.0) {
            cell = 1.0;
        }
        let nx = ((w / cell).floor() as usize + 1).min(1 << 14);
        let ny = ((h / cell).floor() as usize + 1).min(1 << 14);
        let cell = cell.max(w / nx as f64).max(h / ny as f64);
        let mut idx = PointIndex {
            points: points.to_vec(),
            origin: bbox.min,
            cell,
            nx,
            ny,
            starts: vec![0; nx * ny + 1],
            items: vec![0; points.len()],
        };
        let cells: Vec<usize> = points.iter().map(|&p| idx.cell_of(p)).collect();
        for &c in &cells {
            idx.starts[c + 1] += 1;
        }
        for k in 0..nx * ny {
            idx.starts[k + 1] += idx.starts[k];
        }
        let mut fill = idx.starts.clone();
        for (i, &c) in cells.iter().enumerate() {
            idx.items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        idx
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    fn coords(&self, p: Point2) -> (i64, i64) {
        (
            ((p.x - self.origin.x) / self.cell).floor() as i64,
            ((p.y - self.origin.y) / self.cell).floor() as i64,
        )
    }

    fn cell_of(&self, p: Point2) -> usize {
        let (i, j) = self.coords(p);
        let i = i.clamp(0, self.nx as i64 - 1) as usize;
        let j = j.clamp(0, self.ny as i64 - 1) as usize;
        j * self.nx + i
    }

    fn bucket(&self, i: i64, j: i64) -> &[u32] {
        if i < 0 || j < 0 || i >= self.nx as i64 || j >= self.ny as i64 {
            return &[];
        }
        let c = j as usize * self.nx + i as usize;
        &self.items[self.starts[c] as usize..self.starts[c + 1] as usize]
    }

    /// Index and distance of a nearest point (lowest index among exact ties).
    pub fn nearest(&self, q: Point2) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let (ci, cj) = self.coords(q);
        let ci = ci.clamp(-1, self.nx as i64);
        let cj = cj.clamp(-1, self.ny as i64);
        // Distance from q to the clamped cell, so rings are counted from there.
        let cx0 = self.origin.x + ci as f64 * self.cell;
        let cy0 = self.origin.y + cj as f64 * self.cell;
        let gap = (cx0 - q.x).max(q.x - cx0 - self.cell).max(0.0).hypot((cy0 - q.y).max(q.y - cy0 - self.cell).max(0.0));
        let mut best: Option<(usize, f64)> = None;
        let max_ring = self.nx.max(self.ny) as i64 + 2;
        for m in 0..=max_ring {
            self.for_ring(ci, cj, m, |k| {
                let d2 = self.points[k].dist2(q);
                match best {
                    Some((bk, bd)) if d2 > bd || (d2 == bd && k > bk) => {}
                    _ => best = Some((k, d2)),
                }
            });
            if let Some((_, bd)) = best {
                let reach = (m as f64 * self.cell).max(gap);
                if bd.sqrt() <= reach {
                    break;
                }
            }
        }
        best.map(|(k, d2)| (k, d2.sqrt()))
    }

    fn for_ring(&self, ci: i64, cj: i64, m: i64, mut f: impl FnMut(usize)) {
        if m == 0 {
            for &k in self.bucket(ci, cj) {
                f(k as usize);
            }
            return;
        }
        for i in ci - m..=ci + m {
            for &k in self.bucket(i, cj - m) {
                f(k as usize);
            }
            for &k in self.bucket(i, cj + m) {
                f(k as usize);
            }
        }
        for j in cj - m + 1..cj + m {
            for &k in self.bucket(ci - m, j) {
                f(k as usize);
            }
            for &k in self.bucket(ci + m, j) {
                f(k as usize);
            }
        }
    }

    /// Calls `f(index, distance)` for every point with `|p - q| < radius`.
    pub fn for_each_within(&self, q: Point2, radius: f64, mut f: impl FnMut(usize, f64)) {
        let r2 = radius * radius;
        self.scan_box(q, radius, |k| {
            let d2 = self.points[k].dist2(q);
            if d2 < r2 {
                f(k, d2.sqrt());
            }
            false
        });
    }

    /// Whether some point other than those rejected by `skip` lies at
    /// distance `< radius` from `q`.
    pub fn any_within_except(&self, q: Point2, radius: f64, skip: impl Fn(usize) -> bool) -> bool {
        self.any_within_where(q, radius, |k, _| !skip(k))
    }

    /// Whether `pred(index, distance)` holds for some point at distance
    /// `< radius` from `q`; stops at the first hit.
    pub fn any_within_where(&self, q: Point2, radius: f64, mut pred: impl FnMut(usize, f64) -> bool) -> bool {
        let r2 = radius * radius;
        self.scan_box(q, radius, |k| {
            let d2 = self.points[k].dist2(q);
            d2 < r2 && pred(k, d2.sqrt())
        })
    }

    pub fn any_within(&self, q: Point2, radius: f64) -> bool {
        self.any_within_except(q, radius, |_| false)
    }

    fn scan_box(&self, q: Point2, radius: f64, mut f: impl FnMut(usize) -> bool) -> bool {
        if self.points.is_empty() || !(radius > 0.0) {
            return false;
        }
        let (i0, j0) = self.coords(Point2::new(q.x - radius, q.y - radius));
        let (i1, j1) = self.coords(Point2::new(q.x + radius, q.y + radius));
        let i0 = i0.max(0);
        let j0 = j0.max(0);
        let i1 = i1.min(self.nx as i64 - 1);
        let j1 = j1.min(self.ny as i64 - 1);
        for j in j0..=j1 {
            for i in i0..=i1 {
                for &k in self.bucket(i, j) {
                    if f(k as usize) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

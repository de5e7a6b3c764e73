use crate::geom::{Point2, PointIndex, PointSet};

/// Brute-force membership test for the r-convex hull.
///
/// `x` is declared outside iff some center `y` of a square grid of the given
/// pitch (anchored at `x`) satisfies `|y - x| < r` and `dist(y, sample) >= r`.
/// Missing a thin empty region makes the oracle err toward "inside", by at
/// most about `pitch`.
#[derive(Clone, Debug)]
pub struct MembershipOracle {
    index: PointIndex,
    r: f64,
}

impl MembershipOracle {
    pub fn new(sample: &PointSet, r: f64) -> Self {
        MembershipOracle {
            index: PointIndex::new(sample.points()),
            r,
        }
    }

    pub fn contains(&self, x: Point2, pitch: f64) -> bool {
        let r = self.r;
        let Some((_, d0)) = self.index.nearest(x) else {
            return false;
        };
        if d0 >= r {
            return false;
        }
        if d0 == 0.0 {
            return true;
        }
        let m = (r / pitch).ceil() as i64;
        for j in -m..=m {
            let dy = j as f64 * pitch;
            if dy.abs() >= r {
                continue;
            }
            let half = (r * r - dy * dy).sqrt();
            let k = (half / pitch).ceil() as i64;
            let mut i = -k;
            while i <= k {
                let y = Point2::new(x.x + i as f64 * pitch, x.y + dy);
                if y.dist2(x) >= r * r {
                    i += 1;
                    continue;
                }
                let (_, d) = self.index.nearest(y).expect("nonempty");
                if d >= r {
                    return false;
                }
                // Every center closer than r - d to y is still too close.
                let skip = ((r - d) / pitch).ceil() as i64 - 1;
                i += skip.max(1);
            }
        }
        true
    }
}

/// One-shot form of [`MembershipOracle::contains`].
pub fn hull_membership_oracle(sample: &PointSet, r: f64, x: Point2, pitch: f64) -> bool {
    MembershipOracle::new(sample, r).contains(x, pitch)
}

//! Set estimation in the plane.
//!
//! The crate builds the r-convex hull of a planar sample (the intersection of
//! the complements of all open radius-r discs that miss the sample), measures
//! its boundary length, and compares estimated sets with reference supports
//! on rasters: Hausdorff distance of sets and of their boundaries, distance in
//! measure, Minkowski contents, and morphological checks for r-convexity, the
//! outside rolling condition and interior local connectivity. An excess-mass
//! module estimates density level sets over a finite candidate family, and the
//! [`experiments`] module drives seeded Monte Carlo runs.
//!
//! ```
//! use rconvex_core::geom::{Point2, PointSet};
//! use rconvex_core::hull::build_hull;
//!
//! let pts = PointSet::new(vec![
//!     Point2::new(0.0, 0.0),
//!     Point2::new(1.0, 0.0),
//!     Point2::new(0.5, 0.8),
//! ])
//! .unwrap();
//! let hull = build_hull(&pts, 2.0).unwrap();
//! assert_eq!(hull.boundary.arcs.len(), 3);
//! assert!(hull.contains(Point2::new(0.5, 0.3)));
//! ```

pub mod error;
pub mod excess_mass;
pub mod experiments;
pub mod geom;
pub mod hull;
pub mod raster;
pub mod shapes;

pub use error::{Error, Result};

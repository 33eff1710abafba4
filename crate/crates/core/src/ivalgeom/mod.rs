//! Real interval arithmetic and the polygonal complex-interval kernel.
//!
//! Complex intervals are represented by convex polygons that always
//! circumscribe the exact set, so every derived bound is inclusive. Each
//! polygon carries the outward representation tolerance it was built with;
//! tolerances add through Minkowski sums.

mod interval;
mod polygon;
mod wrap;

pub use interval::{unimodal_range, Extremum, RealInterval};
pub use polygon::{ConvexPolygon, Extreme};
pub use wrap::{arc_chain, wrap_annular_sector, wrap_disk, AnnularSector, DiskInterval};

use std::f64::consts::PI;

pub(crate) const TAU: f64 = 2.0 * PI;

/// Smallest tangent step used when circumscribing arcs; bounds the vertex
/// count for absurdly small tolerances.
pub(crate) const MIN_ARC_STEP: f64 = 1e-7;

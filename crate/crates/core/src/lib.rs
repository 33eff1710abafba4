//! Guaranteed beampattern bounds for arrays with bounded element errors.
//!
//! Element amplitude, phase, position, tilt and mutual-coupling errors are
//! described by intervals. Per-element complex intervals are wrapped in
//! convex polygons and summed with Minkowski sums, which yields inclusive
//! upper and lower power bounds at every steering-relative angle. The
//! [`backtrack`] module recovers a concrete error realization that attains a
//! chosen bound.
//!
//! Module map:
//! - [`ivalgeom`]: real intervals and the polygonal complex-interval kernel.
//! - [`arraymodel`]: geometry, directivity, apodization and nominal patterns.
//! - [`boundscore`]: element/structure intervals and the bounded beampattern.
//! - [`backtrack`]: worst-case realization recovery.
//! - [`harness`]: configuration, Monte Carlo, oracles and experiment drivers.

// `!(x > 0.0)` deliberately rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arraymodel;
pub mod backtrack;
pub mod boundscore;
mod error;
pub mod harness;
pub mod ivalgeom;

pub use error::{Error, Result};

/// Complex numbers used throughout for phasors and polygon vertices.
pub type Complex = num_complex::Complex64;

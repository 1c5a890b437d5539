//! Trajectory optimization for car-like vehicles using uniform B-splines.
//!
//! The pipeline takes a collision-free reference trajectory, pushes it away from
//! obstacles while flattening it where the vehicle's swept volume collides
//! (rebound stage), then relaxes timing and enforces kinodynamic limits
//! (refinement stage). Swept volume is estimated with discs: a fixed set at every
//! knot plus minimum-radius discs covering the region swept between knots.
//!
//! Module map:
//! - [`env`]: obstacle point field with an exact nearest-neighbour index.
//! - [`bspline`]: evaluation, derivative control points, boundary conditioning,
//!   clamped curvature, longitudinal/lateral kinematics, least-squares fitting.
//! - [`sweep`]: disc swept-volume construction and the circle / swept-volume checks.
//! - [`penalties`]: every cost term with analytic gradients.
//! - [`solver`]: limited-memory quasi-Newton minimizer with a weak-Wolfe line search.
//! - [`planner`]: rebound with path flattening, time reallocation, refinement.
//! - [`refgen`]: lattice search and trapezoidal profiling for the reference.
//! - [`harness`]: scenarios, random benchmarks, metrics and SVG output.

// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bspline;
pub mod env;
mod error;
pub mod geom;
pub mod harness;
pub mod par;
pub mod penalties;
pub mod planner;
pub mod quadrature;
pub mod refgen;
pub mod solver;
pub mod sweep;

pub use error::{Error, Result};
pub use geom::Vec2;

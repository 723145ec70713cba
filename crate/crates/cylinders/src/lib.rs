//! Tangent-line geometry and rigidity analysis for configurations of equal
//! cylinders touching the unit ball.
//!
//! A configuration of six equal cylinders touching the unit sphere is
//! represented by the six generator lines tangent to the sphere, one per
//! cylinder. The crate provides:
//!
//! - [`geom`]: distances, norms and rotations of tangent lines;
//! - [`canon`]: the canonical octahedral (`O6`) and hexagonal (`C6`)
//!   configurations, the minimax distance functions and symmetry checks;
//! - [`jets`]: the rotation-based perturbation model of `O6` and first/second
//!   order Taylor coefficients of the twelve non-parallel squared distances;
//! - [`certify`]: kernel and dependency analysis of the distance
//!   differentials, positivity certification for families of quadratic forms,
//!   the local-maximality condition checker and a randomized unlocking search;
//! - [`chirality`]: signs of oriented skew-line pairs and generic triples;
//! - [`io`]: the configuration file format and report emission;
//! - [`cli`]: the `cyl` command-line front end.
//!
//! All types are immutable after construction and all operations are pure
//! functions, so values can be shared freely across threads.
//!
//! See the `examples/` directory for runnable walkthroughs of each
//! capability, and `tests/acceptance.rs` for the end-to-end checks.

pub mod canon;
pub mod certify;
pub mod chirality;
pub mod cli;
pub mod dd;
pub mod geom;
pub mod io;
pub mod jets;

pub use canon::{build_c6, build_o6, min_distance, radius_from_distance, LineConfiguration};
pub use geom::{line_distance_sq, OrientedLine, Rotation, TangentLine};

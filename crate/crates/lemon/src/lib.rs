//! Lemon billiards: the billiard map on the intersection of two unit disks,
//! the reflection maps in line coordinates, the period-2 and period-6 orbits,
//! the curves of orbits with two parallel segments, and the invariant
//! manifolds of the hyperbolic period-6 points.
//!
//! The table is fixed by `b`, the distance between the two circle centres;
//! the left centre sits at the origin and the right one at `(b, 0)`.

pub mod billiard;
pub mod cli;
pub mod constants;
pub mod curve;
pub mod error;
pub mod genmap;
pub mod geometry;
pub mod manifolds;
pub mod mat2;
pub mod output;
pub mod parallel;
pub mod periodic;
pub mod phase;
pub mod solve;
pub mod verify;

pub use error::{Error, Result};

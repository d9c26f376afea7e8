//! Matrix kernel: `PSL(2, R)` isometries of the upper half-plane, boundary
//! points and geodesics, and the Minkowski space `R^{3,1}`.

pub mod isometry;
pub mod line;
pub mod minkowski;

pub use isometry::{compose, Isometry2, IsometryKind};
pub use line::{distance, distance_to_segment, geodesics_link, BoundaryPoint, GeodesicLine, Segment};
pub use minkowski::MinkowskiVec;

use crate::error::Result;
use crate::scalar::Real;

pub fn classify_isometry<T: Real>(g: &Isometry2<T>) -> IsometryKind {
    g.classify()
}

pub fn translation_length<T: Real>(g: &Isometry2<T>) -> Result<T> {
    g.translation_length()
}

pub fn axis<T: Real>(g: &Isometry2<T>) -> Result<GeodesicLine> {
    g.axis()
}

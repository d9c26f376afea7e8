use serde::{Deserialize, Serialize};

use super::{classify_plane_pair, dual_segment_type, plane_dual, DSPoint, DualSegment, OrientedPlane, PlanePair};
use crate::error::{Error, Result};

/// Consistency required between an edge length and the plane angle.
const EDGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualEdge {
    pub faces: (usize, usize),
    /// Spacelike length of the dual edge, the exterior dihedral angle.
    pub length: f64,
    pub interior_angle: f64,
}

/// Dual of a polyhedral cap: one vertex of `dS^3` per face and one edge per
/// pair of adjacent faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualComplex {
    pub vertices: Vec<DSPoint>,
    pub edges: Vec<DualEdge>,
}

/// Faces are oriented planes with normals pointing out of the cap;
/// `adjacency` lists pairs of faces sharing an edge.
pub fn polyhedral_dual(faces: &[OrientedPlane], adjacency: &[(usize, usize)]) -> Result<DualComplex> {
    let vertices: Vec<DSPoint> = faces.iter().map(plane_dual).collect();
    let mut edges = Vec::with_capacity(adjacency.len());
    for &(i, j) in adjacency {
        if i >= faces.len() || j >= faces.len() || i == j {
            return Err(Error::Validation(format!("bad adjacency ({i}, {j}) for {} faces", faces.len())));
        }
        let pair = classify_plane_pair(&faces[i], &faces[j])?;
        let PlanePair::Intersecting { angle } = pair else {
            return Err(Error::Validation(format!("not a convex cap: faces {i} and {j} do not meet ({pair:?})")));
        };
        let DualSegment::Spacelike { length } = dual_segment_type(&vertices[i], &vertices[j])? else {
            return Err(Error::Degenerate(format!("dual of faces {i} and {j} is not spacelike")));
        };
        if (length - angle).abs() > EDGE_TOL {
            return Err(Error::Degenerate(format!(
                "dual edge ({i}, {j}) has length {length} but the faces meet at {angle}"
            )));
        }
        edges.push(DualEdge {
            faces: (i, j),
            length,
            interior_angle: std::f64::consts::PI - angle,
        });
    }
    Ok(DualComplex { vertices, edges })
}

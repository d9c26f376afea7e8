//! Polar duality between `H^3` and `dS^3` in the hyperboloid model of
//! `R^{3,1}`.
//!
//! An oriented plane is stored by its unit spacelike normal `n`; the plane
//! bounds the half-space `{<x, n> < 0}` and `n` points out of it. With this
//! convention two disjoint planes are nested (one half-space inside the
//! other) exactly when `<n1, n2> > 1`.

mod cap;

use std::f64::consts::PI;

use nalgebra::Matrix4;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::minkowski::{boost, rotation};
use crate::moebius::MinkowskiVec;
use crate::scalar::Real;

pub use cap::{polyhedral_dual, DualComplex, DualEdge};

/// Tolerance on the quadric equations.
pub const QUADRIC_TOL: f64 = 1e-10;
/// Half-width of the window around `|<n1, n2>| = 1` read as lightlike.
pub const LIGHTLIKE_WINDOW: f64 = 1e-9;

fn check_quadric(v: &MinkowskiVec<f64>, target: f64, what: &str) -> Result<()> {
    let q = v.norm_sq();
    if v.coords.iter().any(|x| !x.is_finite()) || (q - target).abs() >= QUADRIC_TOL {
        return Err(Error::Validation(format!(
            "{what} {:?} has <v, v> = {q}, expected {target}",
            v.coords
        )));
    }
    Ok(())
}

/// Point of `H^3 = {<x, x> = -1, x0 > 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct HPoint {
    v: MinkowskiVec<f64>,
}

impl HPoint {
    pub fn new(v: MinkowskiVec<f64>) -> Result<Self> {
        check_quadric(&v, -1.0, "hyperbolic point")?;
        if !(v.coords[0] > 0.0) {
            return Err(Error::Validation(format!("hyperbolic point {:?} is past-pointing", v.coords)));
        }
        Ok(Self { v })
    }

    pub fn origin() -> Self {
        Self {
            v: MinkowskiVec::basis(0),
        }
    }

    pub fn vector(&self) -> &MinkowskiVec<f64> {
        &self.v
    }

    pub fn distance(&self, other: &HPoint) -> f64 {
        (-self.v.pairing(&other.v)).max(1.0).acosh()
    }

    /// Signed distance to the plane, negative inside its half-space.
    pub fn signed_distance(&self, plane: &OrientedPlane) -> f64 {
        self.v.pairing(&plane.n).asinh()
    }
}

impl TryFrom<[f64; 4]> for HPoint {
    type Error = Error;
    fn try_from(c: [f64; 4]) -> Result<Self> {
        Self::new(MinkowskiVec { coords: c })
    }
}

impl From<HPoint> for [f64; 4] {
    fn from(p: HPoint) -> Self {
        p.v.coords
    }
}

/// Point of `dS^3 = {<x, x> = 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct DSPoint {
    v: MinkowskiVec<f64>,
}

impl DSPoint {
    pub fn new(v: MinkowskiVec<f64>) -> Result<Self> {
        check_quadric(&v, 1.0, "de Sitter point")?;
        Ok(Self { v })
    }

    pub fn vector(&self) -> &MinkowskiVec<f64> {
        &self.v
    }

    /// The oriented plane of `H^3` whose dual is this point.
    pub fn dual_plane(&self) -> OrientedPlane {
        OrientedPlane { n: self.v.clone() }
    }
}

impl TryFrom<[f64; 4]> for DSPoint {
    type Error = Error;
    fn try_from(c: [f64; 4]) -> Result<Self> {
        Self::new(MinkowskiVec { coords: c })
    }
}

impl From<DSPoint> for [f64; 4] {
    fn from(p: DSPoint) -> Self {
        p.v.coords
    }
}

/// Oriented totally geodesic plane `{<x, n> = 0}` of `H^3`, bounding the
/// half-space `{<x, n> < 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct OrientedPlane {
    n: MinkowskiVec<f64>,
}

impl OrientedPlane {
    pub fn new(n: MinkowskiVec<f64>) -> Result<Self> {
        check_quadric(&n, 1.0, "plane normal")?;
        Ok(Self { n })
    }

    /// Normalizes a spacelike vector first.
    pub fn from_normal(n: MinkowskiVec<f64>) -> Result<Self> {
        if !(n.norm_sq() > 0.0) {
            return Err(Error::Validation(format!("normal {:?} is not spacelike", n.coords)));
        }
        Self::new(n.unit().expect("spacelike"))
    }

    /// The plane through `x` orthogonal to the tangent vector `t` at `x`,
    /// with `t` pointing out of the half-space.
    pub fn through(x: &HPoint, t: &MinkowskiVec<f64>) -> Result<Self> {
        let s = x.v.pairing(t);
        let tangent = t.clone() + x.v.scale(&s);
        Self::from_normal(tangent)
    }

    pub fn normal(&self) -> &MinkowskiVec<f64> {
        &self.n
    }

    pub fn reversed(&self) -> Self {
        Self { n: -self.n.clone() }
    }

    pub fn transform(&self, m: &Matrix4<f64>) -> Result<Self> {
        Self::from_normal(self.n.transform(m))
    }
}

impl TryFrom<[f64; 4]> for OrientedPlane {
    type Error = Error;
    fn try_from(c: [f64; 4]) -> Result<Self> {
        Self::new(MinkowskiVec { coords: c })
    }
}

impl From<OrientedPlane> for [f64; 4] {
    fn from(p: OrientedPlane) -> Self {
        p.n.coords
    }
}

/// The unit normal `n*` as a point of `dS^3`.
pub fn plane_dual(p: &OrientedPlane) -> DSPoint {
    DSPoint { v: p.n.clone() }
}

/// Relative position of two oriented planes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum PlanePair {
    /// `angle = arccos <n1, n2>`, the angle between the normals. For the
    /// intersection of the two half-spaces this is the exterior dihedral
    /// angle, `π` minus the interior one.
    Intersecting { angle: f64 },
    /// Disjoint at distance zero; `nested` when `<n1, n2> = 1`.
    Asymptotic { nested: bool },
    /// Disjoint at distance `arccosh |<n1, n2>|`; `nested` when the
    /// half-space of one contains the half-space of the other.
    Disjoint { distance: f64, nested: bool },
}

impl PlanePair {
    /// Interior dihedral angle of the intersection of the two half-spaces.
    pub fn interior_angle(&self) -> Option<f64> {
        match self {
            Self::Intersecting { angle } => Some(PI - angle),
            _ => None,
        }
    }
}

/// Type of the segment joining two points of `dS^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum DualSegment {
    Spacelike { length: f64 },
    /// `connected` is false for `<q1, q2> = -1`, where the segment joins
    /// `q1` to `-q2`.
    Lightlike { connected: bool },
    /// Length `arccosh |<q1, q2>|`. For `<q1, q2> < -1` no geodesic joins
    /// the two points and the segment joins `q1` to `-q2`.
    Timelike { length: f64, connected: bool },
}

fn degenerate(a: &MinkowskiVec<f64>, b: &MinkowskiVec<f64>) -> bool {
    let close = |s: f64| {
        let d: f64 = (0..4).map(|k| (a.coords[k] - s * b.coords[k]).powi(2)).sum::<f64>().sqrt();
        let scale: f64 = a.coords.iter().chain(&b.coords).fold(1.0, |m, x| m.max(x.abs()));
        d <= 1e-12 * scale
    };
    close(1.0) || close(-1.0)
}

enum Case {
    Inside(f64),
    Boundary(bool),
    Outside(f64, bool),
}

fn classify(a: &MinkowskiVec<f64>, b: &MinkowskiVec<f64>) -> Result<Case> {
    if degenerate(a, b) {
        return Err(Error::Degenerate("degenerate pair: equal or opposite".into()));
    }
    let p = a.pairing(b);
    if !p.is_finite() {
        return Err(Error::Validation(format!("pairing {p} is not finite")));
    }
    Ok(if (p.abs() - 1.0).abs() <= LIGHTLIKE_WINDOW {
        Case::Boundary(p > 0.0)
    } else if p.abs() < 1.0 {
        Case::Inside(p.acos())
    } else {
        Case::Outside(p.abs().acosh(), p > 0.0)
    })
}

pub fn classify_plane_pair(p1: &OrientedPlane, p2: &OrientedPlane) -> Result<PlanePair> {
    Ok(match classify(&p1.n, &p2.n)? {
        Case::Inside(angle) => PlanePair::Intersecting { angle },
        Case::Boundary(nested) => PlanePair::Asymptotic { nested },
        Case::Outside(distance, nested) => PlanePair::Disjoint { distance, nested },
    })
}

pub fn dual_segment_type(q1: &DSPoint, q2: &DSPoint) -> Result<DualSegment> {
    Ok(match classify(&q1.v, &q2.v)? {
        Case::Inside(length) => DualSegment::Spacelike { length },
        Case::Boundary(connected) => DualSegment::Lightlike { connected },
        Case::Outside(length, connected) => DualSegment::Timelike { length, connected },
    })
}

/// Whether the two descriptions are the same case of the dictionary, with
/// lengths agreeing to `tol`.
pub fn dictionary_agrees(pair: &PlanePair, seg: &DualSegment, tol: f64) -> bool {
    match (pair, seg) {
        (PlanePair::Intersecting { angle }, DualSegment::Spacelike { length }) => (angle - length).abs() <= tol,
        (PlanePair::Asymptotic { nested }, DualSegment::Lightlike { connected }) => nested == connected,
        (PlanePair::Disjoint { distance, nested }, DualSegment::Timelike { length, connected }) => {
            nested == connected && (distance - length).abs() <= tol
        }
        _ => false,
    }
}

/// Curvatures of the surface at distance `d` from a totally geodesic plane:
/// the induced metric is `cosh^2 d` times hyperbolic and the third
/// fundamental form `sinh^2 d` times hyperbolic.
#[derive(Debug, Clone, PartialEq)]
pub struct EquidistantCurvatures<T> {
    pub k: T,
    pub k_third: T,
}

pub fn equidistant_curvatures<T: Real>(d: &T) -> Result<EquidistantCurvatures<T>> {
    let df = d.to_f64();
    if !(df > 0.0) || !df.is_finite() {
        return Err(Error::Validation(format!("distance {df} must be positive")));
    }
    let c = d.cosh();
    let s = d.sinh();
    Ok(EquidistantCurvatures {
        k: -(T::one() / (c.clone() * c)),
        k_third: -(T::one() / (s.clone() * s)),
    })
}

/// `K* = K / (K + 1)`.
pub fn k_star<T: Real>(k: &T) -> T {
    k.clone() / (k.clone() + T::one())
}

/// Unit tangent direction drawn uniformly from the sphere.
fn random_direction<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r > 1e-3 && r <= 1.0 {
            return v.map(|x| x / r);
        }
    }
}

/// Point at distance at most `spread` from the origin, in a uniformly
/// random direction.
pub fn random_point<R: Rng>(rng: &mut R, spread: f64) -> HPoint {
    let r = rng.gen_range(0.0..=spread);
    let u = random_direction(rng);
    let (c, s) = (r.cosh(), r.sinh());
    HPoint {
        v: MinkowskiVec::new(c, s * u[0], s * u[1], s * u[2]),
    }
}

/// Plane through a random point within `spread` of the origin, with a
/// uniformly random normal direction there.
pub fn random_plane<R: Rng>(rng: &mut R, spread: f64) -> OrientedPlane {
    let x = random_point(rng, spread);
    let u = random_direction(rng);
    OrientedPlane::through(&x, &MinkowskiVec::new(0.0, u[0], u[1], u[2])).expect("tangent vector is spacelike")
}

/// Time-orientation preserving Lorentz transform: three rotations and two
/// boosts with rapidity at most `rapidity`.
pub fn random_lorentz<R: Rng>(rng: &mut R, rapidity: f64) -> Matrix4<f64> {
    let mut m = Matrix4::identity();
    for (i, j) in [(1, 2), (2, 3), (1, 3)] {
        m = rotation(i, j, rng.gen_range(-PI..PI)) * m;
    }
    for axis in [1, 3] {
        m = boost(axis, rng.gen_range(-rapidity..=rapidity)) * m;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(c: [f64; 4]) -> OrientedPlane {
        OrientedPlane::from_normal(MinkowskiVec { coords: c }).unwrap()
    }

    #[test]
    fn nested_planes_pair_above_one() {
        // {x3 < 0} lies inside the half-space of the plane at height d.
        let d: f64 = 0.8;
        let p1 = plane([0.0, 0.0, 0.0, 1.0]);
        let p2 = plane([d.sinh(), 0.0, 0.0, d.cosh()]);
        let inside = HPoint::new(MinkowskiVec::new(2f64.cosh(), 0.0, 0.0, -(2f64.sinh()))).unwrap();
        assert!(inside.signed_distance(&p1) < 0.0 && inside.signed_distance(&p2) < 0.0);
        let between = HPoint::new(MinkowskiVec::new(0.4f64.cosh(), 0.0, 0.0, 0.4f64.sinh())).unwrap();
        assert!(between.signed_distance(&p1) > 0.0 && between.signed_distance(&p2) < 0.0);
        assert!((between.signed_distance(&p2) + (d - 0.4)).abs() < 1e-14);
        match classify_plane_pair(&p1, &p2).unwrap() {
            PlanePair::Disjoint { distance, nested } => {
                assert!(nested);
                assert!((distance - d).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
        match classify_plane_pair(&p1, &p2.reversed()).unwrap() {
            PlanePair::Disjoint { nested, .. } => assert!(!nested),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn quadric_checks() {
        assert!(HPoint::try_from([1.0, 0.0, 0.0, 0.0]).is_ok());
        assert!(HPoint::try_from([-1.0, 0.0, 0.0, 0.0]).is_err());
        assert!(DSPoint::try_from([0.0, 0.0, 1.0, 0.1]).is_err());
        assert!(OrientedPlane::from_normal(MinkowskiVec::new(1.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn through_a_point() {
        let x = HPoint::new(MinkowskiVec::new(1.5f64.cosh(), 1.5f64.sinh(), 0.0, 0.0)).unwrap();
        let p = OrientedPlane::through(&x, &MinkowskiVec::new(0.0, 0.3, 1.0, -0.2)).unwrap();
        assert!(x.signed_distance(&p).abs() < 1e-14);
    }
}

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::isometry::Isometry2;

/// Angular tolerance for coincident boundary points.
pub const ENDPOINT_EPS: f64 = 1e-12;

/// Point of the circle at infinity `R ∪ {∞}` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

impl BoundaryPoint {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            BoundaryPoint::Finite(x) => Some(x),
            BoundaryPoint::Infinity => None,
        }
    }

    /// Position on the circle, in `(-π, π]`, with `∞` at `π`.
    pub fn angle(&self) -> f64 {
        match *self {
            BoundaryPoint::Finite(x) => 2.0 * x.atan(),
            BoundaryPoint::Infinity => PI,
        }
    }

    pub fn image(&self, g: &Isometry2<f64>) -> BoundaryPoint {
        match *self {
            BoundaryPoint::Infinity => {
                if g.c == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(g.a / g.c)
                }
            }
            BoundaryPoint::Finite(x) => {
                let den = g.c * x + g.d;
                if den == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((g.a * x + g.b) / den)
                }
            }
        }
    }

    /// Angular distance on the boundary circle.
    pub fn gap(&self, other: &BoundaryPoint) -> f64 {
        let d = (self.angle() - other.angle()).abs();
        d.min(2.0 * PI - d)
    }

    pub fn coincides(&self, other: &BoundaryPoint) -> bool {
        self.gap(other) < ENDPOINT_EPS
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Finite(x) => write!(f, "{x}"),
            BoundaryPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Complete geodesic of the upper half-plane, stored with an orientation
/// `start -> end`. Linking and crossing ignore the orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicLine {
    pub start: BoundaryPoint,
    pub end: BoundaryPoint,
}

impl GeodesicLine {
    pub fn new(start: BoundaryPoint, end: BoundaryPoint) -> Result<Self> {
        if start.coincides(&end) {
            return Err(Error::Degenerate(format!(
                "geodesic endpoints {start} and {end} coincide"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn finite(u: f64, v: f64) -> Result<Self> {
        Self::new(BoundaryPoint::Finite(u), BoundaryPoint::Finite(v))
    }

    /// Geodesic through two distinct interior points, oriented from `p` to `q`.
    pub fn through(p: Complex64, q: Complex64) -> Result<Self> {
        let dx = q.re - p.re;
        let scale = p.norm() + q.norm();
        if dx.abs() <= 1e-13 * scale {
            let x = 0.5 * (p.re + q.re);
            return if q.im > p.im {
                Self::new(BoundaryPoint::Finite(x), BoundaryPoint::Infinity)
            } else {
                Self::new(BoundaryPoint::Infinity, BoundaryPoint::Finite(x))
            };
        }
        let c = (p.norm_sqr() - q.norm_sqr()) / (2.0 * (p.re - q.re));
        let r = (p - c).norm();
        if dx > 0.0 {
            Self::finite(c - r, c + r)
        } else {
            Self::finite(c + r, c - r)
        }
    }

    pub fn reversed(&self) -> Self {
        Self {
            start: self.end,
            end: self.start,
        }
    }

    pub fn image(&self, g: &Isometry2<f64>) -> Self {
        Self {
            start: self.start.image(g),
            end: self.end.image(g),
        }
    }

    /// Determinant-one isometry sending `start` to 0 and `end` to ∞.
    pub fn standardizer(&self) -> Isometry2<f64> {
        let (a, b, c, d) = match (self.start, self.end) {
            (BoundaryPoint::Finite(u), BoundaryPoint::Finite(v)) => {
                if v > u {
                    (1.0, -u, -1.0, v)
                } else {
                    (-1.0, u, -1.0, v)
                }
            }
            (BoundaryPoint::Infinity, BoundaryPoint::Finite(v)) => (0.0, 1.0, -1.0, v),
            (BoundaryPoint::Finite(u), BoundaryPoint::Infinity) => (1.0, -u, 0.0, 1.0),
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => unreachable!("distinct endpoints"),
        };
        let det: f64 = a * d - b * c;
        let s = det.sqrt();
        Isometry2::from_raw(a / s, b / s, c / s, d / s)
    }

    /// `sinh` of the signed distance from `z`, positive on the left of the
    /// oriented line.
    pub fn signed_sinh_distance(&self, z: Complex64) -> f64 {
        let w = self.standardizer().act(&z);
        -w.re / w.im
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        self.signed_sinh_distance(z).abs().asinh()
    }

    pub fn is_left(&self, z: Complex64) -> bool {
        self.signed_sinh_distance(z) > 0.0
    }

    /// Orthogonal projection of `z` onto the line.
    pub fn project(&self, z: Complex64) -> Complex64 {
        let m = self.standardizer();
        let w = m.act(&z);
        m.inverse().act(&Complex64::new(0.0, w.norm()))
    }

    /// Hyperbolic translation by `distance` along the line towards `end`.
    pub fn translation(&self, distance: f64) -> Isometry2<f64> {
        let m = self.standardizer();
        Isometry2::<f64>::diagonal_translation(&distance).conjugate_by(&m.inverse())
    }

    /// Whether the boundary points `p` and `q` lie in different components
    /// of the complement of the line's endpoints.
    pub fn separates_boundary(&self, p: &BoundaryPoint, q: &BoundaryPoint) -> Result<bool> {
        let (a, b) = (self.start.angle(), self.end.angle());
        let inside = |x: &BoundaryPoint| -> Result<bool> {
            if x.coincides(&self.start) || x.coincides(&self.end) {
                return Err(Error::Degenerate(format!("boundary point {x} is an endpoint")));
            }
            let t = x.angle();
            Ok((a.min(b) < t) && (t < a.max(b)))
        };
        Ok(inside(p)? != inside(q)?)
    }

    /// Whether interior points `p`, `q` lie on opposite sides.
    pub fn separates(&self, p: Complex64, q: Complex64) -> bool {
        let sp = self.signed_sinh_distance(p);
        let sq = self.signed_sinh_distance(q);
        (sp > 0.0) != (sq > 0.0)
    }

    /// Approximate equality of unoriented lines.
    pub fn same_unoriented(&self, other: &GeodesicLine, tol: f64) -> bool {
        let same = self.start.gap(&other.start) < tol && self.end.gap(&other.end) < tol;
        let flipped = self.start.gap(&other.end) < tol && self.end.gap(&other.start) < tol;
        same || flipped
    }
}

/// Whether the endpoint pairs of two geodesics interleave on the boundary.
pub fn geodesics_link(a: &GeodesicLine, b: &GeodesicLine) -> Result<bool> {
    for p in [&b.start, &b.end] {
        if p.coincides(&a.start) || p.coincides(&a.end) {
            return Err(Error::Degenerate(format!(
                "geodesics share the endpoint {p}"
            )));
        }
    }
    a.separates_boundary(&b.start, &b.end)
}

/// Hyperbolic distance in the upper half-plane.
pub fn distance(z: Complex64, w: Complex64) -> f64 {
    let chord = (z - w).norm();
    2.0 * (chord / (2.0 * (z.im * w.im).sqrt())).asinh()
}

/// Hyperbolic distance from `z` to the geodesic segment `[p, q]`.
pub fn distance_to_segment(z: Complex64, p: Complex64, q: Complex64) -> f64 {
    Segment::new(p, q).distance(z)
}

/// Geodesic segment with its standardizing isometry precomputed, for
/// repeated distance queries.
#[derive(Debug, Clone)]
pub struct Segment {
    pub p: Complex64,
    pub q: Complex64,
    frame: Option<(Isometry2<f64>, f64, f64)>,
}

impl Segment {
    pub fn new(p: Complex64, q: Complex64) -> Self {
        let frame = if distance(p, q) < 1e-12 {
            None
        } else {
            GeodesicLine::through(p, q).ok().map(|line| {
                let m = line.standardizer();
                let (hp, hq) = (m.act(&p).norm(), m.act(&q).norm());
                (m, hp.min(hq), hp.max(hq))
            })
        };
        Self { p, q, frame }
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        let Some((m, lo, hi)) = &self.frame else {
            return distance(z, self.p);
        };
        let w = m.act(&z);
        let h = w.norm();
        if h >= *lo && h <= *hi {
            (w.re.abs() / w.im).asinh()
        } else {
            distance(z, self.p).min(distance(z, self.q))
        }
    }
}

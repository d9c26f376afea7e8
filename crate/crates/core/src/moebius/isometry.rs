use std::ops::Mul;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::moebius::line::{BoundaryPoint, GeodesicLine};
use crate::scalar::Real;

/// Trace window around 2 inside which an element counts as parabolic.
pub const TRACE_EPS: f64 = 1e-9;
/// Determinant tolerance after normalization.
pub const DET_EPS: f64 = 1e-12;
/// Compositions between determinant renormalizations in word evaluation.
pub const RENORMALIZE_EVERY: usize = 16;

fn hyperbolic_margin<T: Real>() -> f64 {
    if T::epsilon() >= f64::EPSILON {
        TRACE_EPS
    } else {
        (1e6 * T::epsilon()).max(1e-280)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsometryKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// Orientation-preserving isometry of the upper half-plane, an element of
/// PSL(2, R) stored as its representative with non-negative trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry2<T: Real> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> Isometry2<T> {
    /// Builds an element from arbitrary real entries with positive
    /// determinant, rescaling to determinant one.
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        let det = a.clone() * d.clone() - b.clone() * c.clone();
        if !(det > T::zero()) {
            return Err(Error::Validation(format!(
                "matrix determinant {:e} is not positive",
                det.to_f64()
            )));
        }
        let s = det.sqrt();
        Ok(Self::from_raw(a / s.clone(), b / s.clone(), c / s.clone(), d / s).sign_normalized())
    }

    /// Wraps entries already known to have determinant one; no checks.
    pub fn from_raw(a: T, b: T, c: T, d: T) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_f64(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(T::from_f64(a), T::from_f64(b), T::from_f64(c), T::from_f64(d))
    }

    pub fn identity() -> Self {
        Self::from_raw(T::one(), T::zero(), T::zero(), T::one())
    }

    /// Hyperbolic translation along the imaginary axis by `distance`
    /// towards infinity.
    pub fn diagonal_translation(distance: &T) -> Self {
        let e = (distance.clone() * T::half()).exp();
        let inv = T::one() / e.clone();
        Self::from_raw(e, T::zero(), T::zero(), inv)
    }

    /// Hyperbolic translation along the geodesic from -1 to 1 by `distance`
    /// towards 1.
    pub fn unit_circle_translation(distance: &T) -> Self {
        let h = distance.clone() * T::half();
        let (ch, sh) = (h.cosh(), h.sinh());
        Self::from_raw(ch.clone(), sh.clone(), sh, ch)
    }

    /// Rotation by pi about the point i.
    pub fn half_turn_at_i() -> Self {
        Self::from_raw(T::zero(), -T::one(), T::one(), T::zero())
    }

    pub fn trace(&self) -> T {
        self.a.clone() + self.d.clone()
    }

    pub fn det(&self) -> T {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    pub fn to_f64(&self) -> Isometry2<f64> {
        Isometry2::from_raw(self.a.to_f64(), self.b.to_f64(), self.c.to_f64(), self.d.to_f64())
    }

    pub fn convert<U: Real>(&self) -> Isometry2<U> {
        Isometry2::from_raw(
            U::from_f64(self.a.to_f64()),
            U::from_f64(self.b.to_f64()),
            U::from_f64(self.c.to_f64()),
            U::from_f64(self.d.to_f64()),
        )
    }

    /// Representative with non-negative trace (and, at trace zero, a
    /// non-negative leading nonzero entry).
    pub fn sign_normalized(self) -> Self {
        let tr = self.trace();
        let flip = if tr < T::zero() {
            true
        } else if tr > T::zero() {
            false
        } else {
            let lead = [&self.a, &self.b, &self.c]
                .into_iter()
                .find(|x| !x.is_zero())
                .cloned()
                .unwrap_or_else(T::one);
            lead < T::zero()
        };
        if flip {
            Self::from_raw(-self.a, -self.b, -self.c, -self.d)
        } else {
            self
        }
    }

    /// Divides by the square root of the determinant when its drift from one
    /// exceeds the rounding error of computing it.
    pub fn renormalized(self) -> Self {
        let det = self.det();
        let scale = [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .map(|x| x.to_f64().abs())
            .fold(0.0, f64::max);
        // Rounding error of the determinant itself; below it a rescaling
        // only injects noise.
        let noise = 4.0 * scale * scale * T::epsilon();
        let dev = (det.to_f64() - 1.0).abs();
        if det > T::zero() && dev > noise && dev < 0.5 {
            let s = det.sqrt();
            Self::from_raw(
                self.a / s.clone(),
                self.b / s.clone(),
                self.c / s.clone(),
                self.d / s,
            )
        } else {
            self
        }
    }

    pub fn inverse(&self) -> Self {
        Self::from_raw(self.d.clone(), -self.b.clone(), -self.c.clone(), self.a.clone())
    }

    pub fn conjugate_by(&self, h: &Self) -> Self {
        &(h * self) * &h.inverse()
    }

    /// Möbius action on a point of the upper half-plane.
    pub fn act(&self, z: &Complex<T>) -> Complex<T> {
        let num = z.clone() * self.a.clone() + Complex::new(self.b.clone(), T::zero());
        let den = z.clone() * self.c.clone() + Complex::new(self.d.clone(), T::zero());
        num / den
    }

    /// Max-entry distance to the identity in PSL(2, R).
    pub fn distance_to_identity(&self) -> f64 {
        let g = self.clone().sign_normalized();
        let one = T::one();
        [
            (g.a.clone() - one.clone()).abs().to_f64(),
            g.b.abs().to_f64(),
            g.c.abs().to_f64(),
            (g.d.clone() - one).abs().to_f64(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn classify(&self) -> IsometryKind {
        let tr = self.trace().abs().to_f64();
        if (tr - 2.0).abs() <= TRACE_EPS {
            if self.distance_to_identity() <= TRACE_EPS {
                IsometryKind::Identity
            } else {
                IsometryKind::Parabolic
            }
        } else if tr < 2.0 {
            IsometryKind::Elliptic
        } else {
            IsometryKind::Hyperbolic
        }
    }

    /// Whether `|tr| - 2` exceeds the hyperbolicity margin of the scalar
    /// type: [`TRACE_EPS`] in double precision, far smaller in multiprecision.
    pub fn is_hyperbolic(&self) -> bool {
        let excess = self.trace().abs() - T::two();
        excess > T::from_f64(hyperbolic_margin::<T>())
    }

    /// `2 arccosh(|tr| / 2)` for hyperbolic elements.
    pub fn translation_length(&self) -> Result<T> {
        let tr = self.trace().abs();
        if !self.is_hyperbolic() {
            return Err(Error::NotHyperbolic { trace: tr.to_f64() });
        }
        Ok((tr * T::half()).acosh() * T::two())
    }

    /// Candidate fixed points on the boundary, ordered (repelling, attracting).
    fn fixed_points(&self) -> Result<(BoundaryPoint, BoundaryPoint)> {
        if !self.is_hyperbolic() {
            return Err(Error::NotHyperbolic { trace: self.trace().abs().to_f64() });
        }
        let g = self.to_f64().sign_normalized();
        // c x^2 + (d - a) x - b = 0
        let qa = g.c;
        let qb = g.d - g.a;
        let qc = -g.b;
        let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
        let q = -0.5 * (qb + qb.signum().max(0.0).mul_add(2.0, -1.0) * disc);
        let roots = if qa == 0.0 {
            // One fixed point at infinity.
            [BoundaryPoint::Infinity, BoundaryPoint::Finite(qc / q)]
        } else if q == 0.0 {
            [BoundaryPoint::Finite(0.0), BoundaryPoint::Finite(-qb / qa)]
        } else {
            [BoundaryPoint::Finite(q / qa), BoundaryPoint::Finite(qc / q)]
        };
        // Attracting fixed point: eigenvalue c x + d of modulus > 1, or the
        // point at infinity with |a| > 1.
        let mult = |p: &BoundaryPoint| match *p {
            BoundaryPoint::Infinity => g.a.abs(),
            BoundaryPoint::Finite(x) => (g.c * x + g.d).abs(),
        };
        let (m0, m1) = (mult(&roots[0]), mult(&roots[1]));
        if m0 > m1 {
            Ok((roots[1], roots[0]))
        } else {
            Ok((roots[0], roots[1]))
        }
    }

    /// Oriented axis of a hyperbolic element, from its repelling to its
    /// attracting fixed point.
    pub fn axis(&self) -> Result<GeodesicLine> {
        let (r, a) = self.fixed_points()?;
        GeodesicLine::new(r, a)
    }

    /// Element of the one-parameter subgroup through `self` translating by
    /// `distance` in the direction of `self`.
    pub fn translation_along_axis(&self, distance: &T) -> Result<Self> {
        let g = self.clone().sign_normalized();
        let lambda = g.translation_length()? * T::half();
        let sh = lambda.sinh();
        let half = distance.clone() * T::half();
        let alpha = half.sinh() / sh.clone();
        let beta = (lambda - half).sinh() / sh;
        Ok(Self::from_raw(
            alpha.clone() * g.a + beta.clone(),
            alpha.clone() * g.b,
            alpha.clone() * g.c,
            alpha * g.d + beta,
        ))
    }

    /// Isometry sending `i` to the orthogonal projection of `through` onto
    /// the axis of `self`, and the upward imaginary axis onto the axis with
    /// the orientation of `self`.
    pub fn axis_frame(&self, through: &Complex<T>) -> Result<Self> {
        let g = self.clone().sign_normalized();
        if !g.is_hyperbolic() {
            return Err(Error::NotHyperbolic { trace: g.trace().to_f64() });
        }
        let tr = g.trace();
        let root = (tr.clone() * tr.clone() - T::from_f64(4.0)).sqrt();
        let mu_plus = (tr.clone() + root.clone()) * T::half();
        let mu_minus = (tr - root) * T::half();
        let eigvec = |mu: &T| -> (T, T) {
            let v1 = (g.b.clone(), mu.clone() - g.a.clone());
            let v2 = (mu.clone() - g.d.clone(), g.c.clone());
            let n1 = v1.0.clone() * v1.0.clone() + v1.1.clone() * v1.1.clone();
            let n2 = v2.0.clone() * v2.0.clone() + v2.1.clone() * v2.1.clone();
            if n1 >= n2 {
                v1
            } else {
                v2
            }
        };
        let (p11, p21) = eigvec(&mu_plus);
        let (mut p12, mut p22) = eigvec(&mu_minus);
        let mut det = p11.clone() * p22.clone() - p12.clone() * p21.clone();
        if det < T::zero() {
            p12 = -p12;
            p22 = -p22;
            det = -det;
        }
        if det.is_zero() {
            return Err(Error::Degenerate("axis frame with zero determinant".into()));
        }
        let s = det.sqrt();
        let frame = Self::from_raw(p11 / s.clone(), p12 / s.clone(), p21 / s.clone(), p22 / s);
        let w = frame.inverse().act(through);
        let height = (w.re.clone() * w.re + w.im.clone() * w.im).sqrt();
        let root_h = height.sqrt();
        let slide = Self::from_raw(root_h.clone(), T::zero(), T::zero(), T::one() / root_h);
        Ok(&frame * &slide)
    }

    /// Orthogonal projection of a point onto the axis of `self`.
    pub fn project_to_axis(&self, z: &Complex<T>) -> Result<Complex<T>> {
        let f = self.axis_frame(z)?;
        Ok(f.act(&Complex::new(T::zero(), T::one())))
    }
}

impl<T: Real> Mul for &Isometry2<T> {
    type Output = Isometry2<T>;

    fn mul(self, rhs: &Isometry2<T>) -> Isometry2<T> {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let (e, f, g, h) = (&rhs.a, &rhs.b, &rhs.c, &rhs.d);
        Isometry2::from_raw(
            a.clone() * e.clone() + b.clone() * g.clone(),
            a.clone() * f.clone() + b.clone() * h.clone(),
            c.clone() * e.clone() + d.clone() * g.clone(),
            c.clone() * f.clone() + d.clone() * h.clone(),
        )
        .sign_normalized()
    }
}

impl<T: Real> Mul for Isometry2<T> {
    type Output = Isometry2<T>;

    fn mul(self, rhs: Isometry2<T>) -> Isometry2<T> {
        &self * &rhs
    }
}

/// Composes a sequence of elements left to right, renormalizing the
/// determinant every [`RENORMALIZE_EVERY`] steps.
pub fn compose<'a, T: Real>(factors: impl IntoIterator<Item = &'a Isometry2<T>>) -> Isometry2<T> {
    let mut acc = Isometry2::identity();
    for (k, f) in factors.into_iter().enumerate() {
        acc = &acc * f;
        if (k + 1) % RENORMALIZE_EVERY == 0 {
            acc = acc.renormalized();
        }
    }
    acc
}

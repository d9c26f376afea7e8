use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Vector of `R^{3,1}` with pairing `-x0 y0 + x1 y1 + x2 y2 + x3 y3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiVec<T: Real> {
    pub coords: [T; 4],
}

impl<T: Real> MinkowskiVec<T> {
    pub fn new(x0: T, x1: T, x2: T, x3: T) -> Self {
        Self {
            coords: [x0, x1, x2, x3],
        }
    }

    pub fn basis(k: usize) -> Self {
        let mut coords = [T::zero(), T::zero(), T::zero(), T::zero()];
        coords[k] = T::one();
        Self { coords }
    }

    pub fn pairing(&self, other: &Self) -> T {
        let [x0, x1, x2, x3] = self.coords.clone();
        let [y0, y1, y2, y3] = other.coords.clone();
        -(x0 * y0) + x1 * y1 + x2 * y2 + x3 * y3
    }

    pub fn norm_sq(&self) -> T {
        self.pairing(self)
    }

    pub fn scale(&self, s: &T) -> Self {
        Self {
            coords: self.coords.clone().map(|x| x * s.clone()),
        }
    }

    /// Rescales to `|<v, v>| = 1`; `None` for (numerically) null vectors.
    pub fn unit(&self) -> Option<Self> {
        let n = self.norm_sq().abs();
        if n.to_f64() <= 1e-300 {
            return None;
        }
        Some(self.scale(&(T::one() / n.sqrt())))
    }
}

impl MinkowskiVec<f64> {
    pub fn to_array(&self) -> [f64; 4] {
        self.coords
    }

    /// Applies a linear map given as a 4x4 matrix.
    pub fn transform(&self, m: &Matrix4<f64>) -> Self {
        let v = m * nalgebra::Vector4::from(self.coords);
        Self::new(v[0], v[1], v[2], v[3])
    }
}

impl<T: Real> Add for MinkowskiVec<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let [a0, a1, a2, a3] = self.coords;
        let [b0, b1, b2, b3] = rhs.coords;
        Self::new(a0 + b0, a1 + b1, a2 + b2, a3 + b3)
    }
}

impl<T: Real> Sub for MinkowskiVec<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> Neg for MinkowskiVec<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            coords: self.coords.map(|x| -x),
        }
    }
}

impl<T: Real> Mul<T> for MinkowskiVec<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        self.scale(&rhs)
    }
}

/// The Minkowski Gram matrix `diag(-1, 1, 1, 1)`.
pub fn gram() -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, 1.0, 1.0, 1.0))
}

/// Time-orientation preserving Lorentz boost along `x_axis` with rapidity `r`.
pub fn boost(axis: usize, rapidity: f64) -> Matrix4<f64> {
    assert!((1..4).contains(&axis));
    let mut m = Matrix4::identity();
    let (c, s) = (rapidity.cosh(), rapidity.sinh());
    m[(0, 0)] = c;
    m[(0, axis)] = s;
    m[(axis, 0)] = s;
    m[(axis, axis)] = c;
    m
}

/// Rotation in the spatial `(i, j)` plane.
pub fn rotation(i: usize, j: usize, angle: f64) -> Matrix4<f64> {
    assert!(i != j && (1..4).contains(&i) && (1..4).contains(&j));
    let mut m = Matrix4::identity();
    let (s, c) = angle.sin_cos();
    m[(i, i)] = c;
    m[(j, j)] = c;
    m[(i, j)] = -s;
    m[(j, i)] = s;
    m
}

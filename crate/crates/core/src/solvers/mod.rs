//! Inverse earthquakes along pants curves, the curvature-rescaled inverse
//! `u_K`, and length minimization for weighted sums of curves.

mod inverse;
mod projection;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{CurveClass, FenchelNielsen, MarkedSurface, PantsGraph};

pub use inverse::{
    earthquake_family_member, invert_earthquake, twist_family_spectrum, u_map, uniform_u_convergence_sweep,
    SweepReport, SweepRow,
};
pub use projection::{is_filling_heuristic, minimize_length, project_current, weighted_length};

/// Curvature `K` of the surfaces in the ends, with the curvature
/// `K* = K / (K + 1)` of their third fundamental forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureParam {
    k: f64,
}

impl CurvatureParam {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > -1.0 && k < 0.0) {
            return Err(Error::Validation(format!("curvature K = {k} must lie in (-1, 0)")));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn star(&self) -> f64 {
        self.k / (self.k + 1.0)
    }

    /// `sqrt|K*|`, the factor between lengths of `h` and of the hyperbolic
    /// metric `|K*| h`.
    pub fn scale(&self) -> f64 {
        self.star().abs().sqrt()
    }
}

/// The metric `(1/|κ|) m` of constant curvature `κ`, where `m` is the
/// hyperbolic metric with coordinates `shape`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledMetric {
    pub shape: FenchelNielsen,
    pub curvature: f64,
}

impl ScaledMetric {
    pub fn new(shape: FenchelNielsen, curvature: f64) -> Result<Self> {
        if !(curvature < 0.0) || !curvature.is_finite() {
            return Err(Error::Validation(format!("curvature {curvature} must be negative")));
        }
        Ok(Self { shape, curvature })
    }

    /// `L_h = L_m / sqrt|κ|`.
    pub fn lengths(&self, topo: &PantsGraph, curves: &[CurveClass]) -> Result<Vec<f64>> {
        let s = self.curvature.abs().sqrt();
        Ok(MarkedSurface::new(topo, &self.shape)?
            .lengths(curves)?
            .into_iter()
            .map(|l| l / s)
            .collect())
    }
}

/// Iteration caps, tolerances and finite-difference steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Sup-norm tolerance on the spectrum residual (inverse earthquake) or
    /// the gradient (minimization).
    pub tol: f64,
    pub max_iter: usize,
    pub fd_step: f64,
    /// Jacobian condition estimate above which a solve is refused.
    pub max_condition: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            fd_step: 1e-6,
            max_condition: 1e12,
        }
    }
}

impl SolverConfig {
    /// Defaults for length minimization.
    pub fn minimization() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 500,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tol", self.tol), ("fd_step", self.fd_step), ("max_condition", self.max_condition)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Validation(format!("solver {name} must be positive, got {v}")));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::Validation("solver max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    /// Sup norm of the spectrum residual, or of the gradient.
    pub residual: f64,
    /// Weights, or lengths followed by twists.
    pub solution: Vec<f64>,
    /// Condition estimate of the last Jacobian or of the Hessian.
    pub condition: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curvature_parameter() {
        let k = CurvatureParam::new(-0.9).unwrap();
        assert!((k.star() - (-9.0)).abs() < 1e-12);
        assert!((k.star() - k.k() / (k.k() + 1.0)).abs() < 1e-14);
        assert!(CurvatureParam::new(-1.0).is_err());
        assert!(CurvatureParam::new(0.0).is_err());
        assert!(ScaledMetric::new(FenchelNielsen::uniform(2, 1.0), 0.5).is_err());
    }

    #[test]
    fn scaled_lengths() {
        let topo = PantsGraph::standard(2).unwrap();
        let h = ScaledMetric::new(FenchelNielsen::uniform(2, 1.2), -4.0).unwrap();
        let l = h.lengths(&topo, &[topo.curve_class(0)]).unwrap();
        assert!((l[0] - 0.6).abs() < 1e-12);
    }
}

use nalgebra::{DMatrix, DVector};

use super::{SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::laminations::{lamination_intersection_in_frame, EnumerationBudget, MultiCurve, OrbitFrame};
use crate::surface::{CurveClass, FenchelNielsen, MarkedSurface, PantsGraph};

/// Admissible pants lengths for a minimizer.
const LENGTH_BOUNDS: (f64, f64) = (1e-3, 50.0);
/// Largest sup-norm of a trial step in (log length, twist) coordinates.
const MAX_STEP: f64 = 1.0;
const HESSIAN_STEP: f64 = 1e-4;
const POLISH_STEPS: usize = 3;

/// `Σ_k w_k L_m(c_k)`: the intersection of the weighted sum of curves with
/// the Liouville current of `m`.
pub fn weighted_length(topo: &PantsGraph, mu: &MultiCurve, f: &FenchelNielsen) -> Result<f64> {
    let s = MarkedSurface::new(topo, f)?;
    let mut total = 0.0;
    for (c, w) in &mu.components {
        total += w * s.length(c)?;
    }
    Ok(total)
}

/// Whether every probe curve meets `mu`. A necessary condition for `mu` to
/// fill, not a sufficient one.
pub fn is_filling_heuristic(
    frame: &OrbitFrame,
    mu: &MultiCurve,
    probes: &[CurveClass],
    budget: &EnumerationBudget,
) -> Result<bool> {
    if probes.is_empty() {
        return Err(Error::Validation("empty probe set".into()));
    }
    for p in probes {
        if lamination_intersection_in_frame(frame, mu, p, budget)? <= 0.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn to_coords(x: &DVector<f64>) -> FenchelNielsen {
    let n = x.len() / 2;
    FenchelNielsen::new(x.rows(0, n).iter().map(|v| v.exp()).collect(), x.rows(n, n).iter().copied().collect())
}

fn sup(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

struct Objective<'a> {
    topo: &'a PantsGraph,
    mu: &'a MultiCurve,
    h: f64,
}

impl Objective<'_> {
    fn value(&self, x: &DVector<f64>) -> Result<f64> {
        weighted_length(self.topo, self.mu, &to_coords(x))
    }

    fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let mut g = DVector::zeros(x.len());
        for k in 0..x.len() {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[k] += self.h;
            xm[k] -= self.h;
            g[k] = (self.value(&xp)? - self.value(&xm)?) / (2.0 * self.h);
        }
        Ok(g)
    }

    fn hessian(&self, x: &DVector<f64>, f0: f64) -> Result<DMatrix<f64>> {
        let n = x.len();
        let h = HESSIAN_STEP;
        let shifted = |pairs: &[(usize, f64)]| {
            let mut y = x.clone();
            for &(k, s) in pairs {
                y[k] += s;
            }
            self.value(&y)
        };
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = (shifted(&[(i, h)])? - 2.0 * f0 + shifted(&[(i, -h)])?) / (h * h);
            for j in 0..i {
                let v = (shifted(&[(i, h), (j, h)])? - shifted(&[(i, h), (j, -h)])? - shifted(&[(i, -h), (j, h)])?
                    + shifted(&[(i, -h), (j, -h)])?)
                    / (4.0 * h * h);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }
}

fn check_bounds(x: &DVector<f64>) -> Result<()> {
    let n = x.len() / 2;
    for (j, v) in x.rows(0, n).iter().enumerate() {
        let l = v.exp();
        if !(l >= LENGTH_BOUNDS.0 && l <= LENGTH_BOUNDS.1) {
            return Err(Error::NonFilling(format!(
                "length of pants curve {} left [{}, {}] (reached {l:e})",
                j + 1,
                LENGTH_BOUNDS.0,
                LENGTH_BOUNDS.1
            )));
        }
    }
    Ok(())
}

/// Minimizes [`weighted_length`] over Fenchel-Nielsen coordinates (log
/// lengths and twists) by BFGS with central-difference gradients, then
/// polishes with Newton steps on a difference Hessian, which must be
/// positive definite.
pub fn minimize_length(
    topo: &PantsGraph,
    mu: &MultiCurve,
    start: &FenchelNielsen,
    cfg: &SolverConfig,
) -> Result<(FenchelNielsen, SolveReport)> {
    cfg.validate()?;
    start.validate(topo)?;
    if mu.is_empty() {
        return Err(Error::NonFilling("empty current".into()));
    }
    let obj = Objective {
        topo,
        mu,
        h: cfg.fd_step,
    };
    let n = 2 * start.dim();
    let mut x = DVector::from_iterator(n, start.lengths.iter().map(|l| l.ln()).chain(start.twists.iter().copied()));
    let mut f = obj.value(&x)?;
    let mut g = obj.gradient(&x)?;
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut iterations = 0;
    while iterations < cfg.max_iter && sup(&g) >= cfg.tol {
        iterations += 1;
        let mut p = -(&hinv * &g);
        if g.dot(&p) >= 0.0 {
            hinv = DMatrix::identity(n, n);
            p = -g.clone();
        }
        let scale = sup(&p);
        if scale > MAX_STEP {
            p *= MAX_STEP / scale;
        }
        let slope = g.dot(&p);
        let mut alpha = 1.0;
        let mut next = None;
        for _ in 0..50 {
            let xt = &x + alpha * &p;
            if let Ok(ft) = obj.value(&xt) {
                if ft <= f + 1e-4 * alpha * slope {
                    next = Some((xt, ft));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((xn, fn_)) = next else {
            break;
        };
        check_bounds(&xn)?;
        let gn = obj.gradient(&xn)?;
        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            if iterations == 1 {
                hinv *= sy / y.norm_squared();
            }
            let rho = 1.0 / sy;
            let eye = DMatrix::<f64>::identity(n, n);
            let left = &eye - rho * &s * y.transpose();
            let right = &eye - rho * &y * s.transpose();
            hinv = &left * &hinv * &right + rho * &s * s.transpose();
        }
        (x, f, g) = (xn, fn_, gn);
    }
    let mut condition = f64::NAN;
    if sup(&g) < cfg.tol {
        let mut hess = obj.hessian(&x, f)?;
        for _ in 0..POLISH_STEPS {
            let Some(ch) = hess.clone().cholesky() else {
                break;
            };
            let xn = &x - ch.solve(&g);
            let Ok(gn) = obj.gradient(&xn) else {
                break;
            };
            if sup(&gn) >= sup(&g) {
                break;
            }
            check_bounds(&xn)?;
            iterations += 1;
            x = xn;
            g = gn;
            f = obj.value(&x)?;
            hess = obj.hessian(&x, f)?;
        }
        let eig = hess.clone().symmetric_eigen().eigenvalues;
        let (lo, hi) = (eig.min(), eig.max());
        if !(lo > 0.0) {
            return Err(Error::NonFilling(format!(
                "difference Hessian is not positive definite at the stationary point (eigenvalue {lo:e})"
            )));
        }
        condition = hi / lo;
    }
    let residual = sup(&g);
    let coords = to_coords(&x);
    let report = SolveReport {
        converged: residual < cfg.tol,
        iterations,
        residual,
        solution: coords.lengths.iter().chain(&coords.twists).copied().collect(),
        condition,
    };
    Ok((coords, report))
}

/// `π_ω(μ)`: the metric minimizing the intersection of `μ + ω` with
/// Liouville currents, starting the descent at `start`. The sum must pass
/// the filling heuristic on the marking set.
pub fn project_current(
    topo: &PantsGraph,
    mu: &MultiCurve,
    omega: &MultiCurve,
    start: &FenchelNielsen,
    cfg: &SolverConfig,
    budget: &EnumerationBudget,
) -> Result<(FenchelNielsen, SolveReport)> {
    let total = mu.plus(omega);
    let frame = MarkedSurface::new(topo, start)?.frame()?;
    if total.is_empty() || !is_filling_heuristic(&frame, &total, &topo.marking_set(), budget)? {
        return Err(Error::NonFilling("the current misses a marking curve".into()));
    }
    minimize_length(topo, &total, start, cfg)
}

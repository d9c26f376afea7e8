use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{CurvatureParam, ScaledMetric, SolveReport, SolverConfig};
use crate::earthquake::{fn_twist_coords, pants_index, EarthquakePath, Method};
use crate::error::{Error, Result};
use crate::laminations::{intersection_in_frame, lamination_intersection_in_frame, EnumerationBudget, MultiCurve};
use crate::surface::marked::lengths_f64;
use crate::surface::{holonomy_from_fn, CurveClass, FenchelNielsen, MarkedSurface, PantsGraph};

/// Weights below this are read as zero when forming a lamination.
const WEIGHT_FLOOR: f64 = 1e-8;

fn support_indices(topo: &PantsGraph, support: &[CurveClass]) -> Result<Vec<usize>> {
    if support.is_empty() {
        return Err(Error::Validation("empty earthquake support".into()));
    }
    support
        .iter()
        .map(|c| {
            pants_index(topo, c).ok_or_else(|| {
                Error::Validation(format!("{} is not a pants curve; inversion is restricted to twists", c.name))
            })
        })
        .collect()
}

/// Coordinates after the earthquake of weight `w[k]` along `support[k]`;
/// negative weights are right earthquakes.
fn signed_earthquake(topo: &PantsGraph, m0: &FenchelNielsen, support: &[CurveClass], w: &[f64]) -> Result<FenchelNielsen> {
    let part = |sign: f64| {
        MultiCurve::new(
            support
                .iter()
                .zip(w)
                .filter(|(_, &x)| sign * x > 0.0)
                .map(|(c, &x)| (c.clone(), sign * x))
                .collect(),
        )
    };
    let left = fn_twist_coords(&EarthquakePath::new(topo, m0, &part(1.0)?, 1.0, Method::FnTwist))?;
    fn_twist_coords(&EarthquakePath::new(topo, &left, &part(-1.0)?, 1.0, Method::FnTwist).right())
}

/// Marking-set spectrum of the (signed) earthquake of `m0` along `support`
/// with weights `w`.
pub fn twist_family_spectrum(
    topo: &PantsGraph,
    m0: &FenchelNielsen,
    support: &[CurveClass],
    w: &[f64],
) -> Result<Vec<f64>> {
    let f = signed_earthquake(topo, m0, support, w)?;
    MarkedSurface::new(topo, &f)?.lengths(&topo.marking_set())
}

fn sup(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Weights `w` on the pants curves `support` with
/// `spectrum(E(m0, Σ w_k c_k)) = target` on the marking set, by
/// Levenberg-Marquardt with a central-difference Jacobian.
///
/// The iteration starts from weights read off the length bounds for
/// earthquakes (see `seeds`), then from zero. Failure to
/// reach `cfg.tol` is reported through the returned [`SolveReport`]; a
/// singular Jacobian is an error.
pub fn invert_earthquake(
    topo: &PantsGraph,
    m0: &FenchelNielsen,
    target: &[f64],
    support: &[CurveClass],
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolveReport)> {
    cfg.validate()?;
    let idx = support_indices(topo, support)?;
    let marking = topo.marking_set();
    if target.len() != marking.len() {
        return Err(Error::Validation(format!(
            "target has {} lengths, marking set {}",
            target.len(),
            marking.len()
        )));
    }
    let t = DVector::from_column_slice(target);
    let eval = |w: &DVector<f64>| -> Result<DVector<f64>> {
        Ok(DVector::from_vec(twist_family_spectrum(topo, m0, support, w.as_slice())?) - &t)
    };
    let mut best: Option<SolveReport> = None;
    let mut iterations = 0;
    for seed in seeds(topo, m0, target, &idx, &marking)? {
        let mut rep = levenberg_marquardt(&eval, seed, cfg)?;
        iterations += rep.iterations;
        rep.iterations = iterations;
        let done = rep.converged;
        if best.as_ref().map_or(true, |b| rep.residual < b.residual) {
            best = Some(rep);
        }
        if done {
            break;
        }
    }
    let mut rep = best.expect("at least one seed");
    rep.iterations = iterations;
    Ok((rep.solution.clone(), rep))
}

/// `i(γ, c_j)` for the marking curves `γ` against the pants curves `c_j`,
/// computed once per genus on the symmetric surface.
fn marking_crossings(topo: &PantsGraph) -> Result<Arc<Vec<Vec<usize>>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<Vec<usize>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("cache lock").get(&topo.genus) {
        return Ok(t.clone());
    }
    let frame = MarkedSurface::new(topo, &FenchelNielsen::uniform(topo.genus, 1.5))?.frame()?;
    let budget = EnumerationBudget::default();
    let mut table = Vec::new();
    for g in topo.marking_set() {
        let row = (0..topo.curve_count())
            .map(|j| intersection_in_frame(&frame, &g, &topo.curve_class(j), &budget))
            .collect::<Result<Vec<usize>>>()?;
        table.push(row);
    }
    let t = Arc::new(table);
    cache.lock().expect("cache lock").insert(topo.genus, t.clone());
    Ok(t)
}

/// Step of the scan for a starting weight.
const SEED_STEP: f64 = 0.25;

/// Local minima of the scan kept per support curve.
const SEED_CANDIDATES: usize = 4;
/// Ranked combinations tried before the zero start.
const MAX_SEEDED_STARTS: usize = 2;

/// Lengths for seeding: double precision unless the construction refuses.
fn coarse_lengths(topo: &PantsGraph, f: &FenchelNielsen, curves: &[CurveClass]) -> Result<Vec<f64>> {
    match holonomy_from_fn::<f64>(f, topo).and_then(|r| lengths_f64(&r, curves)) {
        Ok(s) => Ok(s),
        Err(_) => MarkedSurface::new(topo, f)?.lengths(curves),
    }
}

/// Starting points for the iteration, best first, then zero.
///
/// A marking curve crossing `c_j` but no other support curve has a length
/// depending on `w_j` alone, with `|w_j| i(γ, c_j)` within `L_{m0}(γ)` of
/// its target; a scan over both signs of that range gives candidate
/// weights (several when the length is matched on both sides of its
/// minimum), and combinations are ranked by the misfit of the whole
/// spectrum.
fn seeds(
    topo: &PantsGraph,
    m0: &FenchelNielsen,
    target: &[f64],
    idx: &[usize],
    marking: &[CurveClass],
) -> Result<Vec<DVector<f64>>> {
    let n = idx.len();
    let base = MarkedSurface::new(topo, m0)?;
    let table = marking_crossings(topo)?;
    let mut candidates: Vec<Vec<f64>> = Vec::with_capacity(n);
    for &j in idx {
        let alone: Vec<(usize, usize)> = table
            .iter()
            .enumerate()
            .filter(|(_, row)| row[j] > 0 && idx.iter().all(|&k| k == j || row[k] == 0))
            .map(|(q, row)| (q, row[j]))
            .collect();
        let Some(&(q0, i0)) = alone.first() else {
            candidates.push(vec![0.0]);
            continue;
        };
        let curves: Vec<CurveClass> = alone.iter().map(|&(q, _)| marking[q].clone()).collect();
        let mag = target[q0] / i0 as f64;
        let radius = base.length(&marking[q0])? / i0 as f64 + SEED_STEP;
        let misfit = |x: f64| -> Result<f64> {
            let mut delta = vec![0.0; topo.curve_count()];
            delta[j] = x;
            let s = coarse_lengths(topo, &m0.twisted(&delta), &curves)?;
            Ok(s.iter().zip(&alone).map(|(l, &(q, _))| (l - target[q]).powi(2)).sum())
        };
        let steps = (2.0 * radius / SEED_STEP).ceil() as usize;
        let mut minima: Vec<(f64, f64)> = Vec::new();
        for sign in [1.0, -1.0] {
            let xs: Vec<f64> = (0..=steps).map(|k| sign * (mag - radius + k as f64 * SEED_STEP)).collect();
            let vs = xs.iter().map(|&x| misfit(x)).collect::<Result<Vec<_>>>()?;
            for k in 0..vs.len() {
                let left = k == 0 || vs[k] <= vs[k - 1];
                let right = k + 1 == vs.len() || vs[k] <= vs[k + 1];
                if left && right {
                    minima.push((vs[k], xs[k]));
                }
            }
        }
        minima.sort_by(|a, b| a.0.total_cmp(&b.0));
        minima.truncate(SEED_CANDIDATES);
        candidates.push(minima.into_iter().map(|(_, x)| x).collect());
    }
    let mut combos: Vec<Vec<f64>> = vec![vec![]];
    for c in &candidates {
        combos = combos
            .into_iter()
            .flat_map(|prefix| {
                c.iter().map(move |&x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    let mut ranked = Vec::with_capacity(combos.len());
    for w in combos {
        let mut delta = vec![0.0; topo.curve_count()];
        for (slot, &j) in idx.iter().enumerate() {
            delta[j] = w[slot];
        }
        let s = coarse_lengths(topo, &m0.twisted(&delta), marking)?;
        let v: f64 = s.iter().zip(target).map(|(l, t)| (l - t).powi(2)).sum();
        ranked.push((v, DVector::from_vec(w)));
    }
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let zero = DVector::zeros(n);
    let mut out: Vec<DVector<f64>> = ranked.into_iter().map(|(_, w)| w).filter(|w| *w != zero).collect();
    out.truncate(MAX_SEEDED_STARTS);
    out.push(zero);
    Ok(out)
}

fn levenberg_marquardt(
    eval: &dyn Fn(&DVector<f64>) -> Result<DVector<f64>>,
    w0: DVector<f64>,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let n = w0.len();
    let mut w = w0;
    let mut r = eval(&w)?;
    let m = r.len();
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let mut condition = f64::NAN;
    let mut stalls = 0;
    let mut iterations = 0;
    while iterations < cfg.max_iter && sup(&r) >= cfg.tol {
        iterations += 1;
        let mut jac = DMatrix::zeros(m, n);
        for k in 0..n {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[k] += cfg.fd_step;
            wm[k] -= cfg.fd_step;
            let col = (eval(&wp)? - eval(&wm)?) / (2.0 * cfg.fd_step);
            jac.set_column(k, &col);
        }
        let sv = jac.singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !(condition <= cfg.max_condition) {
            return Err(Error::Conditioning { condition });
        }
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        let mut accepted = false;
        while lambda < 1e12 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&(-&g))) else {
                lambda *= 4.0;
                continue;
            };
            let w_new = &w + &step;
            let r_new = eval(&w_new)?;
            let c_new = r_new.norm_squared();
            if c_new < cost {
                stalls = if cost - c_new <= 1e-15 * cost { stalls + 1 } else { 0 };
                (w, r, cost) = (w_new, r_new, c_new);
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        if !accepted || stalls >= 3 {
            break;
        }
    }
    let residual = sup(&r);
    Ok(SolveReport {
        converged: residual < cfg.tol,
        iterations,
        residual,
        solution: w.as_slice().to_vec(),
        condition,
    })
}

/// `u_K(h) = (1/sqrt|K*|) E^{-1}(|K*| h)` with the inverse over the
/// earthquakes of `m0` along `support`.
pub fn u_map(
    topo: &PantsGraph,
    k: &CurvatureParam,
    h: &ScaledMetric,
    m0: &FenchelNielsen,
    support: &[CurveClass],
    cfg: &SolverConfig,
) -> Result<(MultiCurve, SolveReport)> {
    let ks = k.star();
    if (h.curvature - ks).abs() > 1e-12 * ks.abs() {
        return Err(Error::Validation(format!(
            "metric has curvature {}, K* = {ks}",
            h.curvature
        )));
    }
    // |K*| h is the hyperbolic metric with the coordinates of h.
    let target = MarkedSurface::new(topo, &h.shape)?.lengths(&topo.marking_set())?;
    let (w, report) = invert_earthquake(topo, m0, &target, support, cfg)?;
    if !report.converged {
        return Err(Error::Solver(format!(
            "inverse earthquake stopped at residual {:e} after {} iterations",
            report.residual, report.iterations
        )));
    }
    let mut comps = Vec::new();
    for (c, &x) in support.iter().zip(&w) {
        if x < -WEIGHT_FLOOR {
            return Err(Error::NotLeftEarthquake {
                curve: c.name.clone(),
                weight: x,
            });
        }
        if x > WEIGHT_FLOOR {
            comps.push((c.clone(), x / k.scale()));
        }
    }
    Ok((MultiCurve::new(comps)?, report))
}

/// `h = (1/|K*|) E(m0, sqrt|K*| l)`, a metric of curvature `K*` whose
/// lengths approach `i(l, ·)` as `K -> -1`. `l` must be carried by pants
/// curves.
pub fn earthquake_family_member(
    topo: &PantsGraph,
    k: &CurvatureParam,
    m0: &FenchelNielsen,
    l: &MultiCurve,
) -> Result<ScaledMetric> {
    let lam = if l.is_empty() { MultiCurve::empty() } else { l.scaled(k.scale())? };
    let shape = fn_twist_coords(&EarthquakePath::new(topo, m0, &lam, 1.0, Method::FnTwist))?;
    ScaledMetric::new(shape, k.star())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: f64,
    pub k_star: f64,
    pub t: f64,
    /// `L_h(γ)`.
    pub length: f64,
    /// `i(u_K(h), γ)`.
    pub intersection: f64,
    /// `i(l(t), γ)`.
    pub limit: f64,
    /// `L_{m0}(γ) / sqrt|K*|`.
    pub bound: f64,
    /// `|L_h(γ) - i(u_K(h), γ)|`.
    pub deviation: f64,
    /// `|i(u_K(h), γ) - i(l(t), γ)|`.
    pub limit_gap: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub gamma: String,
    pub rows: Vec<SweepRow>,
    /// Per curvature: `(K, max deviation, bound)`.
    pub per_k: Vec<(f64, f64, f64)>,
    /// Whether the bound shrinks along the curvature list.
    pub bound_decreasing: bool,
    pub pass: bool,
}

/// Checks `|L_{h(t)}(γ) - i(u_K(h(t)), γ)| <= L_{m0}(γ)/sqrt|K*|` and the
/// same bound for `|i(u_K(h(t)), γ) - i(l(t), γ)|` at every curvature in
/// `ks` and every `t` in `grid`.
#[allow(clippy::too_many_arguments)]
pub fn uniform_u_convergence_sweep(
    topo: &PantsGraph,
    m0: &FenchelNielsen,
    ks: &[CurvatureParam],
    grid: &[f64],
    family: &dyn Fn(&CurvatureParam, f64) -> Result<ScaledMetric>,
    l: &dyn Fn(f64) -> Result<MultiCurve>,
    gamma: &CurveClass,
    slack: f64,
    cfg: &SolverConfig,
    budget: &EnumerationBudget,
) -> Result<SweepReport> {
    if ks.is_empty() || grid.is_empty() {
        return Err(Error::Validation("sweep needs curvatures and a t grid".into()));
    }
    let base = MarkedSurface::new(topo, m0)?;
    let frame = base.frame()?;
    let l0 = base.length(gamma)?;
    let support: Vec<CurveClass> = (0..topo.curve_count()).map(|j| topo.curve_class(j)).collect();
    let mut rows = Vec::new();
    let mut per_k = Vec::new();
    for k in ks {
        let bound = l0 / k.scale();
        let mut worst: f64 = 0.0;
        for &t in grid {
            let h = family(k, t)?;
            let (u, _) = u_map(topo, k, &h, m0, &support, cfg)?;
            let length = h.lengths(topo, std::slice::from_ref(gamma))?[0];
            let intersection = lamination_intersection_in_frame(&frame, &u, gamma, budget)?;
            let limit = lamination_intersection_in_frame(&frame, &l(t)?, gamma, budget)?;
            let deviation = (length - intersection).abs();
            let limit_gap = (intersection - limit).abs();
            worst = worst.max(deviation);
            rows.push(SweepRow {
                k: k.k(),
                k_star: k.star(),
                t,
                length,
                intersection,
                limit,
                bound,
                deviation,
                limit_gap,
                pass: deviation <= bound + slack && limit_gap <= bound + slack,
            });
        }
        per_k.push((k.k(), worst, bound));
    }
    let bound_decreasing = per_k.windows(2).all(|p| p[1].2 < p[0].2);
    let pass = rows.iter().all(|r| r.pass);
    Ok(SweepReport {
        gamma: gamma.name.clone(),
        rows,
        per_k,
        bound_decreasing,
        pass,
    })
}

//! Earthquakes along weighted multicurves and certificates for the
//! length estimate `|L_t(γ) - t i(γ, l)| <= L_0(γ)`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laminations::{crossings_on_path, lamination_intersection_in_frame, EnumerationBudget, MultiCurve};
use crate::moebius::isometry::Isometry2;
use crate::scalar::{with_precision, BigReal, Real};
use crate::surface::holonomy::{holonomy_from_fn, FuchsianRep};
use crate::surface::marked::{bits_for_growth, entry_growth, RepBuilder};
use crate::surface::{CurveClass, FenchelNielsen, Letter, MarkedSurface, PantsGraph, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Shift the twist coordinates of the supporting pants curves.
    FnTwist,
    /// Insert translations along the lifts crossed by each generator path.
    HolonomyInsert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }
}

/// The earthquake `E^m(t l)` based at the surface with coordinates `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EarthquakePath {
    pub topo: PantsGraph,
    pub base: FenchelNielsen,
    pub lamination: MultiCurve,
    pub t: f64,
    pub method: Method,
    pub side: Side,
}

impl EarthquakePath {
    /// Left earthquake.
    pub fn new(topo: &PantsGraph, base: &FenchelNielsen, lamination: &MultiCurve, t: f64, method: Method) -> Self {
        Self {
            topo: topo.clone(),
            base: base.clone(),
            lamination: lamination.clone(),
            t,
            method,
            side: Side::Left,
        }
    }

    pub fn right(mut self) -> Self {
        self.side = Side::Right;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(Error::Validation(format!("earthquake scale must be >= 0, got {}", self.t)));
        }
        self.base.validate(&self.topo)?;
        if self.method == Method::FnTwist {
            for (c, _) in &self.lamination.components {
                if pants_index(&self.topo, c).is_none() {
                    return Err(Error::UnsupportedFastPath(format!(
                        "{} is not a curve of the pants decomposition",
                        c.name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Whether `a` and `b` are equal cyclic words up to rotation and inversion.
fn same_cyclic(a: &Word, b: &Word) -> bool {
    let (a, b) = (a.cyclically_reduced(), b.cyclically_reduced());
    if a.len() != b.len() {
        return false;
    }
    let binv = b.inverse();
    (0..a.len()).any(|k| {
        let r = a.rotated(k);
        r == b || r == binv
    })
}

/// Index of the pants curve freely homotopic to `c` (either orientation).
pub fn pants_index(topo: &PantsGraph, c: &CurveClass) -> Option<usize> {
    topo.curves.iter().position(|p| same_cyclic(&p.word, &c.word))
}

/// Twist coordinates after the earthquake along pants-curve support.
pub fn fn_twist_coords(path: &EarthquakePath) -> Result<FenchelNielsen> {
    path.validate()?;
    let mut delta = vec![0.0; path.topo.curve_count()];
    for (c, w) in &path.lamination.components {
        let j = pants_index(&path.topo, c)
            .ok_or_else(|| Error::UnsupportedFastPath(format!("{} is not a pants curve", c.name)))?;
        delta[j] += path.side.sign() * path.t * w;
    }
    Ok(path.base.twisted(&delta))
}

/// A translation inserted into a generator image: `shift` along the axis
/// of `conj`.
#[derive(Debug, Clone)]
struct Insertion {
    conj: Word,
    shift: f64,
    curve_length: f64,
}

/// Base point for generator paths; generic so no lift passes through it.
const PATH_BASE: Complex64 = Complex64::new(0.061_803_4, 1.073_205_1);

fn generator_letter(k: usize) -> Letter {
    if k % 2 == 0 {
        Letter::a(k / 2 + 1)
    } else {
        Letter::b(k / 2 + 1)
    }
}

/// Lifts of the lamination crossed by the path from the base point to its
/// image under each generator, in order, with the signed shift.
fn insertion_plan(base: &MarkedSurface, path: &EarthquakePath, budget: &EnumerationBudget) -> Result<Vec<Vec<Insertion>>> {
    let frame = base.frame()?;
    let lengths: Vec<f64> = path
        .lamination
        .components
        .iter()
        .map(|(c, _)| base.length(c))
        .collect::<Result<_>>()?;
    let mut plan = Vec::with_capacity(2 * base.genus());
    for k in 0..2 * base.genus() {
        let g = frame.eval(&Word(vec![generator_letter(k)]));
        let end = g.act(&PATH_BASE);
        let mut found = Vec::new();
        for ((c, w), &len) in path.lamination.components.iter().zip(&lengths) {
            for x in crossings_on_path(&frame, &c.word, PATH_BASE, end, None, budget)? {
                // Seen from the side of the base point, the far side moves
                // to the left: forward along the lift oriented with the base
                // point on its left.
                let dir = if x.start_on_left { 1.0 } else { -1.0 };
                found.push((
                    x.position,
                    Insertion {
                        conj: x.delta.conjugate_by(&x.element).free_reduced(),
                        shift: path.side.sign() * dir * path.t * w,
                        curve_length: len,
                    },
                ));
            }
        }
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        plan.push(found.into_iter().map(|(_, i)| i).collect());
    }
    Ok(plan)
}

fn twisted_images(
    base: &FuchsianRep<BigReal>,
    plan: &[Vec<Insertion>],
) -> Result<Vec<Isometry2<BigReal>>> {
    let mut images = Vec::with_capacity(plan.len());
    for (k, ins) in plan.iter().enumerate() {
        let mut prefix = Isometry2::<BigReal>::identity();
        for x in ins {
            let h = base.eval(&x.conj);
            prefix = &prefix * &h.translation_along_axis(&BigReal::from_f64(x.shift))?;
        }
        images.push((&prefix * &base.images()[k]).renormalized());
    }
    Ok(images)
}

/// Upper estimate of `ln` of the entries of the new generator images.
fn plan_growth(base: &MarkedSurface, plan: &[Vec<Insertion>]) -> f64 {
    with_precision(base.bits(), || {
        let rep = base.rep();
        let ln_entry = |g: &Isometry2<BigReal>| {
            [&g.a, &g.b, &g.c, &g.d]
                .iter()
                .map(|x| x.ln_abs_f64())
                .fold(0.0f64, f64::max)
        };
        plan.iter()
            .enumerate()
            .map(|(k, ins)| {
                ins.iter()
                    .map(|x| {
                        let sh = (0.5 * x.curve_length).sinh().max(1e-300);
                        0.5 * x.shift.abs() - sh.ln() + ln_entry(&rep.eval(&x.conj)) + 1.0
                    })
                    .sum::<f64>()
                    + ln_entry(&rep.images()[k])
            })
            .fold(0.0f64, f64::max)
    })
}

fn check_support(frame_src: &MarkedSurface, path: &EarthquakePath, budget: &EnumerationBudget) -> Result<()> {
    let all_pants = path
        .lamination
        .components
        .iter()
        .map(|(c, _)| pants_index(&path.topo, c))
        .collect::<Option<Vec<_>>>();
    if all_pants.is_some() {
        return Ok(());
    }
    path.lamination.check_disjoint_in(&frame_src.frame()?, budget)
}

/// The earthquaked surface. The fast path rebuilds holonomy from shifted
/// twists; the general path modifies generator images by translations along
/// the crossed lifts, composed in order along each generator path.
/// Largest relator residual accepted for a constructed surface.
pub const MAX_RESIDUAL: f64 = 1e-8;

pub fn earthquake(path: &EarthquakePath, budget: &EnumerationBudget) -> Result<MarkedSurface> {
    path.validate()?;
    match path.method {
        Method::FnTwist => MarkedSurface::new(&path.topo, &fn_twist_coords(path)?),
        Method::HolonomyInsert => {
            let base = MarkedSurface::new(&path.topo, &path.base)?;
            if path.t == 0.0 || path.lamination.is_empty() {
                return Ok(base);
            }
            check_support(&base, path, budget)?;
            let plan = Arc::new(insertion_plan(&base, path, budget)?);
            let bits = bits_for_growth(plan_growth(&base, &plan).max(entry_growth(&path.base)));
            let (topo, coords) = (path.topo.clone(), path.base.clone());
            let builder: RepBuilder = Arc::new(move |bits| {
                with_precision(bits, || {
                    let rep = holonomy_from_fn::<BigReal>(&coords, &topo)?;
                    FuchsianRep::from_images(topo.genus, twisted_images(&rep, &plan)?)
                })
            });
            let quaked = MarkedSurface::from_builder(&path.topo, bits, builder)?;
            // A lift missed by the plan breaks the surface relation.
            let residual = quaked.residual();
            if !(residual < MAX_RESIDUAL) {
                return Err(Error::Construction { residual });
            }
            Ok(quaked)
        }
    }
}

/// Length estimate at one scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRow {
    pub t: f64,
    pub lower: f64,
    pub measured: f64,
    pub upper: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCertificate {
    pub gamma: CurveClass,
    pub lamination: MultiCurve,
    pub intersection: f64,
    pub base_length: f64,
    pub slack: f64,
    pub rows: Vec<CertificateRow>,
    pub pass: bool,
}

impl LemmaCertificate {
    pub fn grid(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }
}

/// Inputs of a certificate that do not depend on the scale.
#[derive(Debug, Clone)]
pub struct EstimateBase {
    pub surface: MarkedSurface,
    pub intersection: f64,
    pub base_length: f64,
}

impl EstimateBase {
    pub fn new(base: &MarkedSurface, l: &MultiCurve, gamma: &CurveClass, budget: &EnumerationBudget) -> Result<Self> {
        let frame = base.frame()?;
        Ok(Self {
            surface: base.clone(),
            intersection: lamination_intersection_in_frame(&frame, l, gamma, budget)?,
            base_length: base.length(gamma)?,
        })
    }
}

/// Checks `i t - L_0 - slack <= L_t <= i t + L_0 + slack` from measured
/// lengths `L_t` on the grid.
pub fn certify(
    gamma: &CurveClass,
    l: &MultiCurve,
    intersection: f64,
    base_length: f64,
    measured: &[(f64, f64)],
    slack: f64,
) -> LemmaCertificate {
    let rows: Vec<CertificateRow> = measured
        .iter()
        .map(|&(t, lt)| {
            let lower = intersection * t - base_length;
            let upper = intersection * t + base_length;
            CertificateRow {
                t,
                lower,
                measured: lt,
                upper,
                pass: lower - slack <= lt && lt <= upper + slack,
            }
        })
        .collect();
    LemmaCertificate {
        gamma: gamma.clone(),
        lamination: l.clone(),
        intersection,
        base_length,
        slack,
        pass: rows.iter().all(|r| r.pass),
        rows,
    }
}

/// Certificate for the length estimate on the grid `t_grid`.
pub fn verify_length_estimate(
    topo: &PantsGraph,
    base: &FenchelNielsen,
    l: &MultiCurve,
    gamma: &CurveClass,
    t_grid: &[f64],
    slack: f64,
    method: Method,
    budget: &EnumerationBudget,
) -> Result<LemmaCertificate> {
    if t_grid.is_empty() {
        return Err(Error::Validation("empty t grid".into()));
    }
    if !(slack >= 0.0) {
        return Err(Error::Validation(format!("slack must be non-negative, got {slack}")));
    }
    let surface = MarkedSurface::new(topo, base)?;
    let eb = EstimateBase::new(&surface, l, gamma, budget)?;
    let measured = t_grid
        .iter()
        .map(|&t| {
            let s = earthquake(&EarthquakePath::new(topo, base, l, t, method), budget)?;
            Ok((t, s.length(gamma)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(certify(gamma, l, eb.intersection, eb.base_length, &measured, slack))
}

/// `L_t(γ) / t` at `t = t_large`.
pub fn asymptotic_slope(
    topo: &PantsGraph,
    base: &FenchelNielsen,
    l: &MultiCurve,
    gamma: &CurveClass,
    t_large: f64,
    method: Method,
    budget: &EnumerationBudget,
) -> Result<f64> {
    if !(t_large > 0.0) {
        return Err(Error::Validation(format!("slope needs t > 0, got {t_large}")));
    }
    let s = earthquake(&EarthquakePath::new(topo, base, l, t_large, method), budget)?;
    Ok(s.length(gamma)? / t_large)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> CurveClass {
        CurveClass::parse(s).unwrap()
    }

    #[test]
    fn pants_curves_recognized_up_to_rotation() {
        let topo = PantsGraph::standard(2).unwrap();
        assert_eq!(pants_index(&topo, &c("B1")), Some(0));
        assert_eq!(pants_index(&topo, &c("b1 A1 B1 a1")), Some(2));
        assert_eq!(pants_index(&topo, &c("b1 a1 B1 A1")), Some(2));
        assert_eq!(pants_index(&topo, &c("a1")), None);
    }

    #[test]
    fn fast_path_rejects_general_support() {
        let topo = PantsGraph::standard(2).unwrap();
        let l = MultiCurve::single(c("a1"), 1.0).unwrap();
        let p = EarthquakePath::new(&topo, &FenchelNielsen::uniform(2, 1.0), &l, 1.0, Method::FnTwist);
        assert!(matches!(
            earthquake(&p, &EnumerationBudget::default()),
            Err(Error::UnsupportedFastPath(_))
        ));
    }

    #[test]
    fn certificate_bounds() {
        let cert = certify(&c("a1"), &MultiCurve::empty(), 2.0, 1.0, &[(0.0, 1.0), (3.0, 7.5)], 1e-6);
        assert!(cert.rows[0].pass);
        assert!(!cert.rows[1].pass);
        assert!(!cert.pass);
    }
}

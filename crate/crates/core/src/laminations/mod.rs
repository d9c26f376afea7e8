//! Weighted multicurves and geometric intersection numbers, counted from
//! holonomy by linking of lifted axes.

pub mod dirichlet;
pub mod enumerate;

use serde::{Deserialize, Serialize};

pub use enumerate::{count_segment_crossings, crossings_on_path, fundamental_segment, PathCrossing, lifts_crossing_segment, Crossings, EnumerationBudget, Lift, OrbitFrame};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::surface::holonomy::FuchsianRep;
use crate::surface::word::CurveClass;

/// Number of lifts of `delta` crossing a fundamental segment of the axis of
/// `gamma`; the geometric intersection number `i(γ, δ)`.
///
/// For `delta = gamma` this counts each transverse self-intersection twice.
pub fn intersection_number<T: Real>(
    rep: &FuchsianRep<T>,
    gamma: &CurveClass,
    delta: &CurveClass,
    budget: &EnumerationBudget,
) -> Result<usize> {
    let frame = OrbitFrame::new(rep)?;
    intersection_in_frame(&frame, gamma, delta, budget)
}

/// [`intersection_number`] with a precomputed frame, for repeated queries
/// on one surface. The segment is taken on the longer curve and lifts of
/// the shorter one are enumerated, which keeps the search region small.
pub fn intersection_in_frame(
    frame: &OrbitFrame,
    gamma: &CurveClass,
    delta: &CurveClass,
    budget: &EnumerationBudget,
) -> Result<usize> {
    let lg = frame.eval(&gamma.word).translation_length();
    let ld = frame.eval(&delta.word).translation_length();
    match (lg, ld) {
        (Ok(lg), Ok(ld)) if ld > lg => intersection_oriented(frame, delta, gamma, budget),
        _ => intersection_oriented(frame, gamma, delta, budget),
    }
}

/// Lifts of `delta` crossing a fundamental segment of `gamma`, without
/// reordering the arguments.
pub fn intersection_oriented(
    frame: &OrbitFrame,
    gamma: &CurveClass,
    delta: &CurveClass,
    budget: &EnumerationBudget,
) -> Result<usize> {
    let not_geodesic = |c: &CurveClass| {
        let g = frame.eval(&c.word);
        if g.is_hyperbolic() {
            Ok(())
        } else {
            Err(Error::NotGeodesic {
                curve: c.name.clone(),
                trace: g.trace().abs(),
            })
        }
    };
    not_geodesic(gamma)?;
    not_geodesic(delta)?;
    count_segment_crossings(frame, &gamma.word, &delta.word, budget)
}

/// Whether `gamma` has no transverse self-intersections.
pub fn is_simple<T: Real>(rep: &FuchsianRep<T>, gamma: &CurveClass, budget: &EnumerationBudget) -> Result<bool> {
    Ok(intersection_number(rep, gamma, gamma, budget)? == 0)
}

/// Rational measured lamination: simple closed curves with positive
/// weights, pairwise disjoint.
///
/// Disjointness is a geometric property checked against a representation
/// with [`MultiCurve::check_disjoint`]; the constructor only checks weights,
/// so the same type also carries general weighted sums of curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct MultiCurve {
    pub components: Vec<(CurveClass, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ComponentDoc {
    word: String,
    weight: f64,
}

impl MultiCurve {
    pub fn new(components: Vec<(CurveClass, f64)>) -> Result<Self> {
        for (c, w) in &components {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::Validation(format!(
                    "weight {w} on {} must be positive",
                    c.name
                )));
            }
        }
        Ok(Self { components })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(c: CurveClass, w: f64) -> Result<Self> {
        Self::new(vec![(c, w)])
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|(_, w)| *w).collect()
    }

    pub fn curves(&self) -> Vec<CurveClass> {
        self.components.iter().map(|(c, _)| c.clone()).collect()
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.components.iter().map(|(c, w)| (c.clone(), w * s)).collect())
    }

    /// Union of components; equal classes are not merged.
    pub fn plus(&self, other: &MultiCurve) -> Self {
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        Self { components }
    }

    /// Checks simplicity of every component and pairwise disjointness.
    pub fn check_disjoint<T: Real>(&self, rep: &FuchsianRep<T>, budget: &EnumerationBudget) -> Result<()> {
        self.check_disjoint_in(&OrbitFrame::new(rep)?, budget)
    }

    pub fn check_disjoint_in(&self, frame: &OrbitFrame, budget: &EnumerationBudget) -> Result<()> {
        for (k, (c, _)) in self.components.iter().enumerate() {
            if intersection_in_frame(frame, c, c, budget)? != 0 {
                return Err(Error::Validation(format!("component {} is not simple", c.name)));
            }
            for (d, _) in &self.components[k + 1..] {
                let n = intersection_in_frame(frame, c, d, budget)?;
                if n != 0 {
                    return Err(Error::Validation(format!(
                        "components {} and {} intersect {n} times",
                        c.name, d.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let docs: Vec<ComponentDoc> = self
            .components
            .iter()
            .map(|(c, w)| ComponentDoc {
                word: c.word.to_string(),
                weight: *w,
            })
            .collect();
        serde_json::to_value(docs).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let docs: Vec<ComponentDoc> =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let comps = docs
            .into_iter()
            .map(|d| Ok((CurveClass::parse(&d.word)?, d.weight)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }
}

/// `i(γ, l) = Σ_k w_k i(γ, c_k)`.
pub fn lamination_intersection<T: Real>(
    rep: &FuchsianRep<T>,
    l: &MultiCurve,
    gamma: &CurveClass,
    budget: &EnumerationBudget,
) -> Result<f64> {
    lamination_intersection_in_frame(&OrbitFrame::new(rep)?, l, gamma, budget)
}

pub fn lamination_intersection_in_frame(
    frame: &OrbitFrame,
    l: &MultiCurve,
    gamma: &CurveClass,
    budget: &EnumerationBudget,
) -> Result<f64> {
    let mut total = 0.0;
    for (c, w) in &l.components {
        total += w * intersection_in_frame(frame, gamma, c, budget)? as f64;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{FenchelNielsen, MarkedSurface, PantsGraph};

    fn base() -> FuchsianRep<f64> {
        let topo = PantsGraph::standard(2).unwrap();
        MarkedSurface::new(&topo, &FenchelNielsen::uniform(2, 1.5))
            .unwrap()
            .rep_f64()
            .unwrap()
    }

    fn c(s: &str) -> CurveClass {
        CurveClass::parse(s).unwrap()
    }

    #[test]
    fn basic_intersections() {
        let rep = base();
        let b = EnumerationBudget::default();
        assert_eq!(intersection_number(&rep, &c("a1"), &c("b1"), &b).unwrap(), 1);
        assert_eq!(intersection_number(&rep, &c("a1"), &c("a2"), &b).unwrap(), 0);
        for p in ["b1", "b2", "a1 b1 A1 B1"] {
            assert_eq!(intersection_number(&rep, &c(p), &c(p), &b).unwrap(), 0, "{p}");
        }
    }

    #[test]
    fn lamination_linearity() {
        let rep = base();
        let b = EnumerationBudget::default();
        let l = MultiCurve::single(c("b1"), 2.5).unwrap();
        assert!((lamination_intersection(&rep, &l, &c("a1"), &b).unwrap() - 2.5).abs() < 1e-15);
        let l = MultiCurve::single(c("b1"), 0.7).unwrap();
        assert_eq!(lamination_intersection(&rep, &l, &c("b1"), &b).unwrap(), 0.0);
    }

    #[test]
    fn multicurve_json_roundtrip() {
        let l = MultiCurve::new(vec![(c("b1"), 1.0), (c("b2"), 3.0)]).unwrap();
        let back = MultiCurve::from_json(&l.to_json()).unwrap();
        assert_eq!(back.weights(), vec![1.0, 3.0]);
        assert!(MultiCurve::single(c("b1"), 0.0).is_err());
    }

    #[test]
    fn disjointness_check() {
        let rep = base();
        let b = EnumerationBudget::default();
        let ok = MultiCurve::new(vec![(c("b1"), 1.0), (c("b2"), 3.0), (c("a1 b1 A1 B1"), 0.5)]).unwrap();
        assert!(ok.check_disjoint(&rep, &b).is_ok());
        let bad = MultiCurve::new(vec![(c("a1"), 1.0), (c("b1"), 1.0)]).unwrap();
        assert!(bad.check_disjoint(&rep, &b).is_err());
    }
}

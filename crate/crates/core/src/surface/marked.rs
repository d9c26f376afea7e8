use std::sync::Arc;

use crate::error::{Error, Result};
use crate::laminations::OrbitFrame;
use crate::scalar::{with_precision, BigReal, Real};
use crate::surface::holonomy::{holonomy_from_fn, FuchsianRep};
use crate::surface::pants::{FenchelNielsen, PantsGraph};
use crate::surface::word::CurveClass;

/// Minimum working precision for holonomy evaluation.
pub const BASE_BITS: usize = 128;
/// Word length the initial precision estimate is sized for.
const PLANNED_WORD_LENGTH: f64 = 10.0;
/// Target absolute error of a computed length (relative above length 1).
const LENGTH_TOL: f64 = 1e-14;

/// Half-width of the embedded collar around a geodesic of length `l`.
fn collar(l: f64) -> f64 {
    (1.0 / (0.5 * l).sinh()).asinh()
}

/// A priori bound for `ln` of the generator entries built from `fnc`.
pub fn entry_growth(fnc: &FenchelNielsen) -> f64 {
    fnc.twists
        .iter()
        .zip(&fnc.lengths)
        .map(|(t, l)| 0.5 * t.abs() + 2.0 * collar(*l) + 0.5 * l)
        .sum::<f64>()
        + 2.0
}

/// Working precision sized for words of moderate length with entries of
/// size `exp(growth)`.
pub fn bits_for_growth(growth: f64) -> usize {
    BASE_BITS + (std::f64::consts::LOG2_E * (PLANNED_WORD_LENGTH + 2.0) * growth).ceil() as usize
}

/// Rebuilds the holonomy at a requested working precision.
pub type RepBuilder = Arc<dyn Fn(usize) -> Result<FuchsianRep<BigReal>> + Send + Sync>;

/// Hyperbolic structure on a marked surface with its holonomy held in
/// multiprecision. Surfaces built from coordinates on a pants decomposition
/// remember them; others (earthquakes along general multicurves) only keep
/// a recipe for their holonomy.
#[derive(Clone)]
pub struct MarkedSurface {
    pub topo: PantsGraph,
    coords: Option<FenchelNielsen>,
    bits: usize,
    rep: FuchsianRep<BigReal>,
    builder: RepBuilder,
}

impl std::fmt::Debug for MarkedSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MarkedSurface")
            .field("genus", &self.topo.genus)
            .field("coords", &self.coords)
            .field("bits", &self.bits)
            .finish()
    }
}

impl MarkedSurface {
    pub fn new(topo: &PantsGraph, coords: &FenchelNielsen) -> Result<Self> {
        coords.validate(topo)?;
        let bits = bits_for_growth(entry_growth(coords));
        Self::with_bits(topo, coords, bits)
    }

    pub fn with_bits(topo: &PantsGraph, coords: &FenchelNielsen, bits: usize) -> Result<Self> {
        let (t, c) = (topo.clone(), coords.clone());
        let builder: RepBuilder = Arc::new(move |b| with_precision(b, || holonomy_from_fn::<BigReal>(&c, &t)));
        let mut s = Self::from_builder(topo, bits, builder)?;
        s.coords = Some(coords.clone());
        Ok(s)
    }

    /// Surface whose holonomy is produced by `builder`, evaluated at `bits`.
    pub fn from_builder(topo: &PantsGraph, bits: usize, builder: RepBuilder) -> Result<Self> {
        let rep = builder(bits)?;
        Ok(Self {
            topo: topo.clone(),
            coords: None,
            bits,
            rep,
            builder,
        })
    }

    /// Coordinates on the pants decomposition, when the surface was built
    /// from them.
    pub fn coords(&self) -> Option<&FenchelNielsen> {
        self.coords.as_ref()
    }

    pub fn genus(&self) -> usize {
        self.topo.genus
    }

    /// The same surface rebuilt at `bits`.
    pub fn at_bits(&self, bits: usize) -> Result<Self> {
        Ok(Self {
            rep: (self.builder)(bits)?,
            bits,
            ..self.clone()
        })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn rep(&self) -> &FuchsianRep<BigReal> {
        &self.rep
    }

    pub fn residual(&self) -> f64 {
        self.rep.residual()
    }

    /// Double-precision copy of the holonomy, for geometric enumeration.
    pub fn rep_f64(&self) -> Result<FuchsianRep<f64>> {
        let r = self.rep.to_f64();
        let finite = r
            .images()
            .iter()
            .all(|m| [m.a, m.b, m.c, m.d].iter().all(|x| x.is_finite()));
        if !finite {
            return Err(Error::Degenerate(
                "generator entries exceed double precision range".into(),
            ));
        }
        // Quantify the double-precision relator residual for the caller.
        FuchsianRep::from_images(r.genus, r.images().to_vec())
    }

    /// Orbit frame for intersection counts on this surface.
    pub fn frame(&self) -> Result<OrbitFrame> {
        with_precision(self.bits, || OrbitFrame::new(&self.rep))
    }

    /// Geodesic length of `curve`, raising the precision when the
    /// cancellation estimate says the stored one is insufficient.
    pub fn length(&self, curve: &CurveClass) -> Result<f64> {
        let (l, needed) = with_precision(self.bits, || length_checked(&self.rep, curve))?;
        if needed <= self.bits {
            return Ok(l);
        }
        let mut bits = needed;
        for _ in 0..4 {
            let s = self.at_bits(bits)?;
            let (l, needed) = with_precision(bits, || length_checked(&s.rep, curve))?;
            if needed <= bits {
                return Ok(l);
            }
            bits = needed.max(2 * bits);
        }
        Err(Error::Solver(format!(
            "length of {} not resolved at {bits} bits",
            curve.name
        )))
    }

    pub fn lengths(&self, curves: &[CurveClass]) -> Result<Vec<f64>> {
        curves.iter().map(|c| self.length(c)).collect()
    }
}

/// Length of `curve` under `rep` (evaluated at the working precision),
/// with the precision the evaluation would have needed.
pub fn length_checked(rep: &FuchsianRep<BigReal>, curve: &CurveClass) -> Result<(f64, usize)> {
    let (g, ln_mag) = rep.eval_with_magnitude(&curve.word);
    let growth = rep
        .images()
        .iter()
        .flat_map(|m| [&m.a, &m.b, &m.c, &m.d])
        .map(|x| x.ln_abs_f64())
        .fold(0.0f64, f64::max);
    let l = g.translation_length().map_err(|_| Error::NotGeodesic {
        curve: curve.name.clone(),
        trace: g.trace().abs().to_f64(),
    })?;
    let lf: f64 = l.to_f64();
    // d tr / d L = 2 sinh(L / 2); entries of the images carry their own
    // construction error, bounded by their size squared.
    let ln_sensitivity = (2.0 * (0.5 * lf).sinh()).ln();
    let ln_err_unit = ((curve.word.len() + 8) as f64).ln() + ln_mag + 2.0 * growth - ln_sensitivity;
    let ln_tol = (LENGTH_TOL * lf.max(1.0)).ln();
    let needed = ((ln_err_unit - ln_tol) * std::f64::consts::LOG2_E).ceil().max(0.0) as usize + 16;
    Ok((lf, needed.max(BASE_BITS)))
}

/// Length spectrum in plain double precision, for callers that have checked
/// the coordinates are moderate.
pub fn lengths_f64(rep: &FuchsianRep<f64>, curves: &[CurveClass]) -> Result<Vec<f64>> {
    curves
        .iter()
        .map(|c| crate::surface::holonomy::curve_length(rep, c))
        .collect()
}

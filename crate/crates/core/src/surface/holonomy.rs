use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moebius::isometry::{Isometry2, IsometryKind, RENORMALIZE_EVERY};
use crate::scalar::Real;
use crate::surface::pants::{FenchelNielsen, PantsGraph};
use crate::surface::word::{reduced_words, CurveClass, Word};

/// Relator residual accepted by the construction.
pub const RELATOR_EPS: f64 = 1e-9;
/// Translation lengths below this count as a degenerate systole.
pub const SYSTOLE_EPS: f64 = 1e-4;

// Orientation of the twist parameter in each kind of gluing, chosen so that
// increasing a twist is the left earthquake along that curve.
const HANDLE_TWIST_SIGN: f64 = -1.0;
const BOUNDARY_TWIST_SIGN: f64 = -1.0;
const CHAIN_TWIST_SIGN: f64 = 1.0;

/// Images of the generators `a_1, b_1, ..., a_g, b_g`.
#[derive(Debug, Clone)]
pub struct FuchsianRep<T: Real> {
    pub genus: usize,
    images: Vec<Isometry2<T>>,
    inverses: Vec<Isometry2<T>>,
    residual: f64,
}

impl<T: Real> FuchsianRep<T> {
    /// Wraps generator images, computing the relator residual.
    pub fn from_images(genus: usize, images: Vec<Isometry2<T>>) -> Result<Self> {
        if images.len() != 2 * genus {
            return Err(Error::Validation(format!(
                "expected {} generator images, found {}",
                2 * genus,
                images.len()
            )));
        }
        let inverses = images.iter().map(|g| g.inverse()).collect();
        let mut rep = Self {
            genus,
            images,
            inverses,
            residual: 0.0,
        };
        rep.residual = rep.eval(&crate::surface::word::relator(genus)).distance_to_identity();
        Ok(rep)
    }

    pub fn images(&self) -> &[Isometry2<T>] {
        &self.images
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn image(&self, letter: crate::surface::word::Letter) -> &Isometry2<T> {
        let k = letter.generator();
        if letter.is_inverse() {
            &self.inverses[k]
        } else {
            &self.images[k]
        }
    }

    pub fn eval(&self, word: &Word) -> Isometry2<T> {
        let mut acc = Isometry2::identity();
        for (k, &l) in word.letters().iter().enumerate() {
            acc = &acc * self.image(l);
            if (k + 1) % RENORMALIZE_EVERY == 0 {
                acc = acc.renormalized();
            }
        }
        acc
    }

    /// Value of `word` together with `ln tr(|A_1| ... |A_n|)`, the size of
    /// the entries the evaluation passed through.
    pub fn eval_with_magnitude(&self, word: &Word) -> (Isometry2<T>, f64) {
        let value = self.eval(word);
        let mut acc = [T::one(), T::zero(), T::zero(), T::one()];
        for &l in word.letters() {
            let g = self.image(l);
            let m = [g.a.abs(), g.b.abs(), g.c.abs(), g.d.abs()];
            acc = [
                acc[0].clone() * m[0].clone() + acc[1].clone() * m[2].clone(),
                acc[0].clone() * m[1].clone() + acc[1].clone() * m[3].clone(),
                acc[2].clone() * m[0].clone() + acc[3].clone() * m[2].clone(),
                acc[2].clone() * m[1].clone() + acc[3].clone() * m[3].clone(),
            ];
        }
        let tr = acc[0].clone() + acc[3].clone();
        (value, tr.ln_abs_f64())
    }

    pub fn convert<U: Real>(&self) -> FuchsianRep<U> {
        FuchsianRep {
            genus: self.genus,
            images: self.images.iter().map(|g| g.convert()).collect(),
            inverses: self.inverses.iter().map(|g| g.convert()).collect(),
            residual: self.residual,
        }
    }

    pub fn to_f64(&self) -> FuchsianRep<f64> {
        FuchsianRep {
            genus: self.genus,
            images: self.images.iter().map(|g| g.to_f64()).collect(),
            inverses: self.inverses.iter().map(|g| g.to_f64()).collect(),
            residual: self.residual,
        }
    }
}

/// Translation length of the holonomy of `γ`.
pub fn curve_length<T: Real>(rep: &FuchsianRep<T>, curve: &CurveClass) -> Result<f64> {
    let g = rep.eval(&curve.word);
    g.translation_length()
        .map(|l| l.to_f64())
        .map_err(|_| Error::NotGeodesic {
            curve: curve.name.clone(),
            trace: g.trace().abs().to_f64(),
        })
}

/// Boundary-curve data of one standard pair of pants: `x`, `y` and `x y` are
/// hyperbolic with the prescribed lengths, with feet of common perpendiculars.
struct Pants<T: Real> {
    x: Isometry2<T>,
    y: Isometry2<T>,
    foot_x: Complex<T>,
    foot_y: Complex<T>,
    /// Foot on the axis of `x y` of its common perpendicular with `x`.
    foot_xy: Complex<T>,
}

fn i_point<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// Feet of the common perpendicular of two hyperbolic elements with
/// disjoint axes: `(on axis of g, on axis of h)`.
fn common_perpendicular<T: Real>(
    g: &Isometry2<T>,
    h: &Isometry2<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    let f = g.axis_frame(&i_point())?;
    let hs = h.conjugate_by(&f.inverse());
    let uv = -hs.b.clone() / hs.c.clone();
    if !(uv > T::zero()) {
        return Err(Error::Degenerate("axes are not disjoint".into()));
    }
    let foot_g = f.act(&Complex::new(T::zero(), uv.sqrt()));
    let foot_h = h.project_to_axis(&foot_g)?;
    Ok((foot_g, foot_h))
}

fn pants<T: Real>(l1: &T, l2: &T, l3: &T) -> Result<Pants<T>> {
    let h = T::half();
    let (h1, h2, h3) = (l1.clone() * h.clone(), l2.clone() * h.clone(), l3.clone() * h);
    let cosh_d = (h3.cosh() + h1.cosh() * h2.cosh()) / (h1.sinh() * h2.sinh());
    let d = cosh_d.acosh();
    let x = Isometry2::diagonal_translation(l1);
    let m = Isometry2::unit_circle_translation(&d);
    let candidates = [l2.clone(), -l2.clone()]
        .map(|s| Isometry2::diagonal_translation(&s).conjugate_by(&m).sign_normalized());
    // Raw trace of x y with both factors of positive trace.
    let raw_trace = |y: &Isometry2<T>| {
        x.a.clone() * y.a.clone()
            + x.b.clone() * y.c.clone()
            + x.c.clone() * y.b.clone()
            + x.d.clone() * y.d.clone()
    };
    let [y0, y1] = candidates;
    let y = if raw_trace(&y0) < raw_trace(&y1) { y0 } else { y1 };
    let foot_x = i_point();
    let foot_y = m.act(&i_point());
    let xy = &x * &y;
    let (foot_xy, _) = common_perpendicular(&xy, &x)?;
    Ok(Pants {
        x,
        y,
        foot_x,
        foot_y,
        foot_xy,
    })
}

/// Isometry sending the oriented axis of `from` to that of `to`, with the
/// base point `from_foot` mapped `shift` beyond `to_foot`.
fn gluing<T: Real>(
    to: &Isometry2<T>,
    to_foot: &Complex<T>,
    from: &Isometry2<T>,
    from_foot: &Complex<T>,
    shift: &T,
) -> Result<Isometry2<T>> {
    let ft = to.axis_frame(to_foot)?;
    let ff = from.axis_frame(from_foot)?;
    Ok(&(&ft * &Isometry2::diagonal_translation(shift)) * &ff.inverse())
}

/// A one-holed torus `<a, b>` with boundary `[a, b]`.
struct Handle<T: Real> {
    a: Isometry2<T>,
    b: Isometry2<T>,
    boundary: Isometry2<T>,
    boundary_foot: Complex<T>,
}

fn handle<T: Real>(lb: &T, le: &T, twist: &T) -> Result<Handle<T>> {
    let p = pants(lb, lb, le)?;
    let b = p.y.inverse();
    let shift = T::from_f64(HANDLE_TWIST_SIGN) * twist.clone();
    let a = gluing(&p.x, &p.foot_x, &b, &p.foot_y, &shift)?;
    let boundary = &p.x * &p.y;
    Ok(Handle {
        a,
        b,
        boundary,
        boundary_foot: p.foot_xy,
    })
}

/// Holonomy of the hyperbolic structure with the given coordinates.
///
/// Handles are built as one-holed tori and attached one at a time along a
/// chain of pants; twists shift the gluing frames along the glued axis.
pub fn holonomy_from_fn<T: Real>(fnc: &FenchelNielsen, topo: &PantsGraph) -> Result<FuchsianRep<T>> {
    let rep = FuchsianRep::from_images(topo.genus, generator_images(fnc, topo)?)?;
    if !(rep.residual() < RELATOR_EPS) {
        return Err(Error::Construction {
            residual: rep.residual(),
        });
    }
    Ok(rep)
}

/// Generator images of [`holonomy_from_fn`] without the residual check.
pub fn generator_images<T: Real>(fnc: &FenchelNielsen, topo: &PantsGraph) -> Result<Vec<Isometry2<T>>> {
    fnc.validate(topo)?;
    let g = topo.genus;
    let len = |j: usize| T::from_f64(fnc.lengths[j]);
    let tw = |j: usize| T::from_f64(fnc.twists[j]);

    let handles: Vec<Handle<T>> = (1..=g)
        .map(|i| {
            handle(
                &len(topo.handle_curve_index(i)),
                &len(topo.handle_boundary_index(i)),
                &tw(topo.handle_curve_index(i)),
            )
        })
        .collect::<Result<_>>()?;

    let mut images = Vec::with_capacity(2 * g);
    images.push(handles[0].a.clone());
    images.push(handles[0].b.clone());
    let mut chain = handles[0].boundary.clone();
    let mut chain_foot = handles[0].boundary_foot.clone();

    for k in 1..g - 1 {
        let q = pants(
            &len(topo.chain_curve_index(k)),
            &len(topo.handle_boundary_index(k + 1)),
            &len(topo.chain_curve_index(k + 1)),
        )?;
        let shift = T::from_f64(CHAIN_TWIST_SIGN) * tw(topo.chain_curve_index(k));
        let gq = gluing(&chain, &chain_foot, &q.x, &q.foot_x, &shift)?;
        let y = q.y.conjugate_by(&gq);
        let y_foot = gq.act(&q.foot_y);
        let h = &handles[k];
        let shift = T::from_f64(BOUNDARY_TWIST_SIGN) * tw(topo.handle_boundary_index(k + 1));
        let gh = gluing(&y, &y_foot, &h.boundary, &h.boundary_foot, &shift)?;
        images.push(h.a.conjugate_by(&gh));
        images.push(h.b.conjugate_by(&gh));
        chain = (&q.x * &q.y).conjugate_by(&gq);
        chain_foot = gq.act(&q.foot_xy);
    }

    let last = &handles[g - 1];
    let closing = chain.inverse();
    let shift = T::from_f64(BOUNDARY_TWIST_SIGN) * tw(topo.handle_boundary_index(g));
    let gh = gluing(&closing, &chain_foot, &last.boundary, &last.boundary_foot, &shift)?;
    images.push(last.a.conjugate_by(&gh));
    images.push(last.b.conjugate_by(&gh));

    Ok(images.into_iter().map(|m| m.renormalized()).collect())
}

/// Diagnostics of a representation.
#[derive(Debug, Clone, Serialize)]
pub struct RepDiagnostics {
    pub residual: f64,
    pub residual_ok: bool,
    pub min_pants_length: f64,
    pub max_pants_length: f64,
    pub pants_hyperbolic: bool,
    /// Shortest translation length among words of length at most
    /// [`SYSTOLE_WORD_LENGTH`].
    pub systole_estimate: f64,
    pub systole_word: String,
    pub systole_ok: bool,
    pub valid: bool,
}

pub const SYSTOLE_WORD_LENGTH: usize = 6;

pub fn validate_rep<T: Real>(rep: &FuchsianRep<T>, topo: &PantsGraph) -> RepDiagnostics {
    let residual = rep.residual();
    let residual_ok = residual < RELATOR_EPS;
    let mut min_l = f64::INFINITY;
    let mut max_l: f64 = 0.0;
    let mut pants_hyperbolic = true;
    for c in &topo.curves {
        match rep.eval(&c.word).translation_length() {
            Ok(l) => {
                let l = l.to_f64();
                min_l = min_l.min(l);
                max_l = max_l.max(l);
            }
            Err(_) => pants_hyperbolic = false,
        }
    }
    let f = rep.to_f64();
    let mut systole = f64::INFINITY;
    let mut systole_word = String::new();
    for len in 1..=SYSTOLE_WORD_LENGTH {
        for w in reduced_words(rep.genus, len) {
            let m = f.eval(&w);
            let short = match m.classify() {
                IsometryKind::Hyperbolic => m.translation_length().unwrap_or(0.0),
                IsometryKind::Identity => continue,
                _ => 0.0,
            };
            // Identity elements are relator consequences; skip words that
            // numerically collapse to the identity.
            if m.distance_to_identity() < 1e-7 {
                continue;
            }
            if short < systole {
                systole = short;
                systole_word = w.to_string();
            }
        }
    }
    let systole_ok = systole >= SYSTOLE_EPS;
    RepDiagnostics {
        residual,
        residual_ok,
        min_pants_length: min_l,
        max_pants_length: max_l,
        pants_hyperbolic,
        systole_estimate: systole,
        systole_word,
        systole_ok,
        valid: residual_ok && pants_hyperbolic && systole_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::isometry::Isometry2;
    use crate::scalar::{with_precision, BigReal};

    fn genus2(l: [f64; 3], t: [f64; 3]) -> FuchsianRep<BigReal> {
        let topo = PantsGraph::standard(2).unwrap();
        with_precision(256, || holonomy_from_fn(&FenchelNielsen::new(l.to_vec(), t.to_vec()), &topo))
            .unwrap()
    }

    fn length(rep: &FuchsianRep<BigReal>, w: &Word) -> f64 {
        with_precision(256, || rep.eval(w).translation_length().unwrap().to_f64())
    }

    #[test]
    fn pants_lengths() {
        let p = pants(&1.0, &2.0, &3.0).unwrap();
        assert!((p.x.translation_length().unwrap() - 1.0).abs() < 1e-12);
        assert!((p.y.translation_length().unwrap() - 2.0).abs() < 1e-12);
        let xy = &p.x * &p.y;
        assert!((xy.translation_length().unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_genus_two_is_valid() {
        let rep = genus2([1.5; 3], [0.0; 3]);
        assert!(rep.residual() < RELATOR_EPS);
        let topo = PantsGraph::standard(2).unwrap();
        for c in &topo.curves {
            let l = length(&rep, &c.word);
            assert!((l - 1.5).abs() < 1e-9, "{}: {l}", c.name);
        }
        let d = with_precision(256, || validate_rep(&rep, &topo));
        assert!(d.valid, "{d:?}");
    }

    #[test]
    fn twisting_preserves_twisted_length() {
        let topo = PantsGraph::standard(2).unwrap();
        for s in [-3.0, -0.4, 0.9, 7.0] {
            let rep = genus2([1.1, 2.0, 0.7], [s, -s, 2.0 * s]);
            for (j, c) in topo.curves.iter().enumerate() {
                let l = length(&rep, &c.word);
                assert!((l - [1.1, 2.0, 0.7][j]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn higher_genus_construction() {
        for g in 3..=4 {
            let topo = PantsGraph::standard(g).unwrap();
            let n = 3 * g - 3;
            let lengths: Vec<f64> = (0..n).map(|j| 0.8 + 0.1 * j as f64).collect();
            let twists: Vec<f64> = (0..n).map(|j| 0.3 * j as f64 - 0.5).collect();
            let rep: FuchsianRep<BigReal> = with_precision(256, || {
                holonomy_from_fn(&FenchelNielsen::new(lengths.clone(), twists), &topo)
            })
            .unwrap();
            assert!(rep.residual() < RELATOR_EPS, "genus {g}: {}", rep.residual());
            for (j, c) in topo.curves.iter().enumerate() {
                let l = length(&rep, &c.word);
                assert!((l - lengths[j]).abs() < 1e-9, "genus {g}, {}: {l}", c.name);
            }
        }
    }

    #[test]
    fn degenerate_lengths_flag_systole() {
        let topo = PantsGraph::standard(2).unwrap();
        let rep = genus2([1e-8, 1.0, 1.0], [0.0; 3]);
        let d = with_precision(256, || validate_rep(&rep, &topo));
        assert!(!d.systole_ok);
        assert!(!d.valid);
    }

    #[test]
    fn corrupted_generator_is_detected() {
        let rep = genus2([1.5; 3], [0.0; 3]).to_f64();
        let mut images = rep.images().to_vec();
        images[0] = &images[0] * &Isometry2::from_f64(1.0, 0.1, 0.0, 1.0).unwrap();
        let bad = FuchsianRep::from_images(2, images).unwrap();
        assert!(bad.residual() > 1e-3);
    }

    #[test]
    fn zero_length_is_rejected() {
        let topo = PantsGraph::standard(2).unwrap();
        let r = holonomy_from_fn::<f64>(&FenchelNielsen::new(vec![0.0, 1.0, 1.0], vec![0.0; 3]), &topo);
        assert!(matches!(r, Err(Error::Validation(_))));
    }
}

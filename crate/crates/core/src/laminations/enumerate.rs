use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dirichlet::dirichlet_domain;
use crate::error::{Error, Result};
use crate::moebius::isometry::Isometry2;
use crate::moebius::line::{distance, GeodesicLine, Segment};
use crate::scalar::Real;
use crate::surface::holonomy::FuchsianRep;
use crate::surface::word::{Letter, Word};

/// Limits for the orbit enumeration behind intersection counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnumerationBudget {
    /// Maximal word length of enumerated group elements.
    pub max_radius: usize,
    /// Number of consecutive radii with an unchanged count that is accepted
    /// when the search region is not exhausted.
    pub window: usize,
    /// Hyperbolic distance kept around the search region beyond the
    /// covering radius of the orbit.
    pub margin: f64,
}

/// Default number of breadth-first steps. The walk is confined to a
/// neighbourhood of the segment and normally exhausts it well before this.
pub const DEFAULT_RADIUS: usize = 64;

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self {
            max_radius: DEFAULT_RADIUS,
            window: 3,
            margin: 0.25,
        }
    }
}

impl EnumerationBudget {
    pub fn with_radius(max_radius: usize) -> Self {
        Self {
            max_radius,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 2 || self.max_radius < self.window {
            return Err(Error::Validation(format!(
                "budget needs radius >= window >= 2 (radius {}, window {})",
                self.max_radius, self.window
            )));
        }
        if !(self.margin >= 0.0) {
            return Err(Error::Validation("budget margin must be non-negative".into()));
        }
        Ok(())
    }
}

/// `cosh` of the displacement of `i` by `g`.
fn cosh_displacement(g: &Isometry2<f64>) -> f64 {
    0.5 * (g.a * g.a + g.b * g.b + g.c * g.c + g.d * g.d)
}

pub(super) fn displacement(g: &Isometry2<f64>) -> f64 {
    cosh_displacement(g).max(1.0).acosh()
}

/// Isometry sending `z` to `i`.
fn centering(z: Complex64) -> Isometry2<f64> {
    let s = z.im.sqrt();
    Isometry2::from_raw(1.0 / s, -z.re / s, 0.0, s)
}

/// A generating set of the holonomy group conjugated so that the generators
/// move `i` as little as possible.
///
/// The enumeration walks orbit points of `i`; generators with small
/// displacement keep the walk inside a thin neighbourhood of the region of
/// interest, and working near `i` keeps double precision meaningful.
#[derive(Debug, Clone)]
pub struct OrbitFrame {
    pub genus: usize,
    /// Conjugation from the representation's coordinates to the frame.
    pub to_frame: Isometry2<f64>,
    /// Generators in frame coordinates with their words; inverses follow
    /// each generator.
    gens: Vec<(Word, Isometry2<f64>)>,
    /// Largest displacement of `i` by a generator.
    pub reach: f64,
    /// Side pairings of the Dirichlet domain at `i`, inverses adjacent.
    steps: Vec<(Word, Isometry2<f64>)>,
    /// Circumradius of that domain.
    pub covering: f64,
    images: Vec<Isometry2<f64>>,
}

impl OrbitFrame {
    /// Builds the frame for `rep`. The centre and generating set are chosen
    /// in double precision; the conjugation itself is carried out in the
    /// scalar type of `rep`, since the conjugating element can be large.
    pub fn new<T: Real>(rep: &FuchsianRep<T>) -> Result<Self> {
        let approx = rep.to_f64();
        let mut set: Vec<(Word, Isometry2<f64>)> = (1..=2 * rep.genus as i16)
            .map(|k| (Word(vec![Letter(k)]), approx.image(Letter(k)).clone()))
            .collect();
        for (_, g) in &set {
            if ![g.a, g.b, g.c, g.d].iter().all(|x| x.is_finite()) {
                return Err(Error::Degenerate("non-finite generator entries".into()));
            }
        }
        let mut to_frame = Isometry2::identity();
        for round in 0..9 {
            let m = best_center(&set);
            set = set
                .into_iter()
                .map(|(w, g)| (w, g.conjugate_by(&m)))
                .collect();
            to_frame = (&m * &to_frame).renormalized();
            if round == 8 || !nielsen_reduce(&mut set) {
                break;
            }
        }

        let m = Isometry2::<T>::new(
            T::from_f64(to_frame.a),
            T::from_f64(to_frame.b),
            T::from_f64(to_frame.c),
            T::from_f64(to_frame.d),
        )?;
        let precise: Vec<Isometry2<T>> = rep.images().iter().map(|g| g.conjugate_by(&m)).collect();
        let framed = FuchsianRep::from_images(rep.genus, precise)?;
        let images: Vec<Isometry2<f64>> = framed.images().iter().map(|g| g.to_f64()).collect();
        let mut gens = Vec::with_capacity(2 * set.len());
        for (w, _) in set {
            let g = framed.eval(&w).to_f64();
            let wi = w.inverse();
            let gi = g.inverse();
            gens.push((w, g));
            gens.push((wi, gi));
        }
        let reach = gens.iter().map(|(_, g)| displacement(g)).fold(0.0, f64::max);
        let domain = dirichlet_domain(&gens, rep.genus)?;
        Ok(Self {
            genus: rep.genus,
            to_frame: m.to_f64(),
            gens,
            reach,
            steps: domain.sides,
            covering: domain.radius,
            images,
        })
    }

    /// Holonomy of `word` in frame coordinates.
    pub fn eval(&self, word: &Word) -> Isometry2<f64> {
        let mut acc = Isometry2::identity();
        for (k, l) in word.0.iter().enumerate() {
            let g = &self.images[l.generator()];
            acc = if l.is_inverse() { &acc * &g.inverse() } else { &acc * g };
            if (k + 1) % 16 == 0 {
                acc = acc.renormalized();
            }
        }
        acc
    }

    /// Conjugate `u w u^-1` of `word` whose axis passes closest to `i`,
    /// searched over short products of the frame generators.
    pub fn centered_conjugate(&self, word: &Word) -> Result<(Word, Isometry2<f64>)> {
        let g = self.eval(word);
        let axis = g.axis()?;
        let i = Complex64::new(0.0, 1.0);
        let mut best = (axis.distance(i), Word::empty());
        let mut frontier = vec![(Word::empty(), Isometry2::<f64>::identity(), usize::MAX)];
        for _ in 0..CONJUGATE_SEARCH {
            let mut next = Vec::new();
            for (w, h, last) in &frontier {
                for (k, (gw, gi)) in self.gens.iter().enumerate() {
                    if *last != usize::MAX && k == (*last ^ 1) {
                        continue;
                    }
                    let h2 = h * gi;
                    let w2 = w.concat(gw);
                    // Axis of h g h^-1 is h(axis); its distance to i equals
                    // the distance of h^-1 i to the axis of g.
                    let d = axis.distance(h2.inverse().act(&i));
                    if d < best.0 - 1e-6 {
                        best = (d, w2.clone());
                    }
                    next.push((w2, h2, k));
                }
            }
            frontier = next;
        }
        // Evaluating the reduced conjugate avoids the cancellation in
        // multiplying out h g h^-1.
        let w = word.conjugate_by(&best.1).free_reduced();
        let g = self.eval(&w);
        Ok((w, g))
    }
}

impl OrbitFrame {
    /// Group element `u` with `u i` near `z`, by greedy descent over the
    /// generators.
    pub fn walk_towards(&self, z: Complex64) -> (Word, Isometry2<f64>) {
        let i = Complex64::new(0.0, 1.0);
        let mut word = Word::empty();
        let mut u = Isometry2::identity();
        let mut d = distance(i, z);
        loop {
            let best = self
                .gens
                .iter()
                .map(|(w, g)| {
                    let v = &u * g;
                    (distance(v.act(&i), z), w, v)
                })
                .min_by(|a, b| a.0.total_cmp(&b.0));
            match best {
                Some((dn, w, v)) if dn < d - 1e-9 => {
                    d = dn;
                    word = word.concat(w);
                    u = v;
                }
                _ => break,
            }
        }
        (word.free_reduced(), u)
    }
}

/// Longest piece of a fundamental segment searched from one centre.
pub const PIECE_LENGTH: f64 = 2.0;

/// A lift crossing a path, located along it.
#[derive(Debug, Clone)]
pub struct PathCrossing {
    /// Conjugator `h`: the lift is the axis of `h δ' h^-1`.
    pub element: Word,
    /// The conjugate `δ'` of the crossing curve used for the enumeration.
    pub delta: Word,
    /// Distance from the start of the path to the crossing.
    pub position: f64,
    /// Whether the start of the path lies on the left of the oriented lift.
    pub start_on_left: bool,
}

/// Lifts of `delta` crossing the geodesic segment `[z0, z1]` (frame
/// coordinates), ordered along it.
///
/// The segment is cut into pieces of length at most [`PIECE_LENGTH`]; each
/// piece is moved next to `i` by a group element before searching, so all
/// geometry stays in the well-conditioned part of the frame. `carrier`, if
/// given, is a group element whose axis contains the segment; its lifts are
/// skipped.
pub fn crossings_on_path(
    frame: &OrbitFrame,
    delta: &Word,
    z0: Complex64,
    z1: Complex64,
    carrier: Option<&Word>,
    budget: &EnumerationBudget,
) -> Result<Vec<PathCrossing>> {
    let (dw, d) = frame.centered_conjugate(delta)?;
    let len = distance(z0, z1);
    let line = GeodesicLine::through(z0, z1)?;
    let at = |t: f64| line.translation(t).act(&z0);
    let n = (len / PIECE_LENGTH).ceil().max(1.0) as usize;
    let step = len / n as f64;
    let mut out = Vec::new();
    for k in 0..n {
        let (ta, tb) = (k as f64 * step, (k + 1) as f64 * step);
        let (uw, u) = frame.walk_towards(at(ta + 0.5 * step));
        let ui = u.inverse();
        let local = |t: f64| ui.act(&at(t));
        let carrier = carrier.map(|c| frame.eval(&c.conjugate_by(&uw.inverse()).free_reduced()));
        let found = lifts_crossing_segment(frame, &dw, &d, local(ta), local(tb), carrier.as_ref(), budget)?;
        for lift in found.lifts {
            let start_on_left = lift.line.is_left(local(ta));
            // Bisect for the crossing point on the piece.
            let (mut lo, mut hi) = (ta, tb);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if lift.line.is_left(local(mid)) == start_on_left {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(PathCrossing {
                element: uw.concat(&lift.element).free_reduced(),
                delta: dw.clone(),
                position: 0.5 * (lo + hi),
                start_on_left,
            });
        }
    }
    out.sort_by(|a, b| a.position.total_cmp(&b.position));
    Ok(out)
}

/// Number of lifts of `delta` crossing a fundamental segment of the axis
/// of `gamma`, excluding lifts equal to `gamma`'s axis.
pub fn count_segment_crossings(
    frame: &OrbitFrame,
    gamma: &Word,
    delta: &Word,
    budget: &EnumerationBudget,
) -> Result<usize> {
    let (gw, g) = frame.centered_conjugate(gamma)?;
    let (q0, q1) = fundamental_segment(&g)?;
    Ok(crossings_on_path(frame, delta, q0, q1, Some(&gw), budget)?.len())
}

/// Word length searched for a conjugate with axis near the frame centre.
const CONJUGATE_SEARCH: usize = 4;

/// Isometry moving the point of least total generator displacement to `i`.
fn best_center(set: &[(Word, Isometry2<f64>)]) -> Isometry2<f64> {
    let cost = |z: Complex64| -> f64 {
        let m = centering(z);
        set.iter().map(|(_, g)| cosh_displacement(&g.conjugate_by(&m))).sum()
    };
    let at = |x: f64, t: f64| Complex64::new(x * t.exp(), t.exp());
    let (mut bx, mut bt) = (0.0, 0.0);
    let mut best = cost(at(bx, bt));
    for i in -12..=12 {
        for j in -12..=12 {
            let (x, t) = (0.25 * i as f64, 0.25 * j as f64);
            let c = cost(at(x, t));
            if c < best {
                (best, bx, bt) = (c, x, t);
            }
        }
    }
    let mut step = 0.25;
    while step > 1e-6 {
        let mut moved = false;
        for (dx, dt) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let c = cost(at(bx + dx, bt + dt));
            if c < best {
                (best, bx, bt) = (c, bx + dx, bt + dt);
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    centering(at(bx, bt))
}

/// Greedy Nielsen moves `s_i -> s_i s_j^±1` or `s_j^±1 s_i` that lower the
/// total displacement of `i`. Returns whether anything changed.
fn nielsen_reduce(set: &mut [(Word, Isometry2<f64>)]) -> bool {
    let mut changed = false;
    for _ in 0..64 {
        let mut best: Option<(usize, Word, Isometry2<f64>, f64)> = None;
        for i in 0..set.len() {
            let current = cosh_displacement(&set[i].1);
            for j in 0..set.len() {
                if i == j {
                    continue;
                }
                let (wj, gj) = &set[j];
                for (ws, gs) in [(wj.clone(), gj.clone()), (wj.inverse(), gj.inverse())] {
                    for left in [false, true] {
                        let (w, g) = if left {
                            (ws.concat(&set[i].0), &gs * &set[i].1)
                        } else {
                            (set[i].0.concat(&ws), &set[i].1 * &gs)
                        };
                        let gain = current - cosh_displacement(&g);
                        if gain > 1e-9 * current && best.as_ref().map_or(true, |b| gain > b.3) {
                            best = Some((i, w.free_reduced(), g, gain));
                        }
                    }
                }
            }
        }
        match best {
            Some((i, w, g, _)) => {
                set[i] = (w, g);
                changed = true;
            }
            None => break,
        }
    }
    changed
}

/// One lift `h δ h^-1` of a closed curve to the upper half-plane.
#[derive(Debug, Clone)]
pub struct Lift {
    /// Word of the conjugator `h`.
    pub element: Word,
    /// `h` in frame coordinates.
    pub conjugator: Isometry2<f64>,
    /// Oriented axis of `h δ h^-1` in frame coordinates.
    pub line: GeodesicLine,
}

/// Orbit points bucketed on a grid that is uniform in hyperbolic terms.
pub(super) struct OrbitSet {
    cells: HashMap<(i64, i64), Vec<Complex64>>,
}

const CELL: f64 = 0.05;
const SAME_POINT: f64 = 1e-6;
/// Crossings further apart than this (in log-height or direction cosine)
/// belong to different lifts; closer ones are compared in the group, since
/// lift endpoints are ill-conditioned along the expanding direction.
const NEAR_CROSSING: f64 = 1e-3;
/// Lines passing this close to both segment endpoints are candidates for
/// containing it; the image of an axis under a long conjugator drifts by
/// rounding, so candidates are confirmed in the group.
const ON_SEGMENT: f64 = 1e-3;

/// Log-height and direction cosine of the crossing of `line` with the
/// imaginary axis, after `std` moved the segment there.
fn crossing_key(std: &Isometry2<f64>, line: &GeodesicLine) -> Option<(f64, f64)> {
    let l = line.image(std);
    let (u, v) = (l.start.finite()?, l.end.finite()?);
    let (u, v) = (u.min(v), u.max(v));
    if !(u < 0.0 && v > 0.0) {
        return None;
    }
    Some((0.5 * (-u * v).ln(), (u + v) / (v - u)))
}

impl OrbitSet {
    pub(super) fn new() -> Self {
        Self {
            cells: HashMap::new(),
        }
    }

    fn row(z: Complex64) -> i64 {
        (z.im.ln() / CELL).floor() as i64
    }

    fn col(z: Complex64, row: i64) -> i64 {
        let yc = ((row as f64 + 0.5) * CELL).exp();
        (z.re / (CELL * yc)).floor() as i64
    }

    /// Inserts `z` unless a point within [`SAME_POINT`] is present.
    pub(super) fn insert(&mut self, z: Complex64) -> bool {
        let r0 = Self::row(z);
        for r in r0 - 1..=r0 + 1 {
            let c0 = Self::col(z, r);
            for c in c0 - 1..=c0 + 1 {
                if let Some(v) = self.cells.get(&(r, c)) {
                    if v.iter().any(|w| distance(*w, z) < SAME_POINT) {
                        return false;
                    }
                }
            }
        }
        self.cells.entry((r0, Self::col(z, r0))).or_default().push(z);
        true
    }
}

/// Whether `h2 = h1 δ^k` for some `k`, i.e. both conjugators give the same
/// lift. In a torsion-free group it suffices that `h1^-1 h2` and `δ^k`
/// agree on one point.
fn differ_by_power(h1: &Isometry2<f64>, h2: &Isometry2<f64>, d: &Isometry2<f64>, ld: f64, p_hat: Complex64) -> bool {
    let m = &h1.inverse() * h2;
    let i = Complex64::new(0.0, 1.0);
    let target = m.act(&i);
    let k = (distance(p_hat, m.act(&p_hat)) / ld).round() as usize;
    let dk = (0..k).fold(Isometry2::identity(), |acc, _| &acc * d);
    [dk.clone(), dk.inverse()]
        .iter()
        .any(|g| distance(g.act(&i), target) < 1e-6 * (1.0 + k as f64))
}

/// Result of a stabilized enumeration.
#[derive(Debug, Clone)]
pub struct Crossings {
    pub lifts: Vec<Lift>,
    /// Distinct crossing lifts found up to each radius.
    pub counts: Vec<usize>,
    /// Orbit points kept at each radius.
    pub frontier_sizes: Vec<usize>,
    /// Orbit points found so far within capture distance of the segment.
    pub captured: Vec<usize>,
    /// Whether the search region was exhausted before the radius limit.
    pub exhausted: bool,
}

const FRONTIER_CAP: usize = 2_000_000;

/// Lifts of the closed curve with holonomy `d_iso` (frame coordinates)
/// whose axes cross the segment `[z0, z1]` (frame coordinates)
/// transversally.
///
/// When the segment lies on the axis of `carrier`, lifts that are conjugates
/// equal to `carrier^±1` run along the segment and are skipped.
pub fn lifts_crossing_segment(
    frame: &OrbitFrame,
    delta: &Word,
    d_iso: &Isometry2<f64>,
    z0: Complex64,
    z1: Complex64,
    carrier: Option<&Isometry2<f64>>,
    budget: &EnumerationBudget,
) -> Result<Crossings> {
    budget.validate()?;
    let axis = d_iso.axis().map_err(|_| Error::NotGeodesic {
        curve: delta.to_string(),
        trace: d_iso.trace().abs(),
    })?;
    let ld = d_iso.translation_length()?;
    let p = Complex64::new(0.0, 1.0);
    let p_hat = axis.project(p);
    // A lift crossing the segment carries a translate of the projection of
    // `p` within half a period of the crossing. Walking through adjacent
    // Dirichlet tiles along a path to such a point never leaves the covering
    // radius of the path, so the kept region contains every one of them.
    let capture = 0.5 * ld + axis.distance(p) + 1e-9;
    let keep = capture + frame.covering + budget.margin;
    let seg = Segment::new(z0, z1);
    let legs = [Segment::new(p, z0), Segment::new(p, z1)];
    let region = |q: Complex64, d_seg: f64| d_seg.min(legs[0].distance(q)).min(legs[1].distance(q));

    let mut seen = OrbitSet::new();
    seen.insert(p);
    let mut lifts: Vec<Lift> = Vec::new();
    let seg_std = GeodesicLine::through(z0, z1)?.standardizer();
    let mut keys: Vec<(f64, f64)> = Vec::new();
    // Records the lift through `q` if it crosses; returns whether `q` is
    // within capture distance.
    let mut consider = |word: &dyn Fn() -> Word, h: &Isometry2<f64>, d_seg: f64, lifts: &mut Vec<Lift>| -> bool {
        if d_seg > capture {
            return false;
        }
        let line = axis.image(h);
        if !line.separates(z0, z1) {
            return true;
        }
        if line.distance(z0) < ON_SEGMENT && line.distance(z1) < ON_SEGMENT {
            if let Some(g) = carrier {
                let conj = d_iso.conjugate_by(h);
                let i = Complex64::new(0.0, 1.0);
                let target = conj.act(&i);
                let tol = 1e-6 * (1.0 + distance(i, target));
                if distance(g.act(&i), target) < tol || distance(g.inverse().act(&i), target) < tol {
                    return true;
                }
            }
        }
        let Some(key) = crossing_key(&seg_std, &line) else {
            return true;
        };
        let duplicate = keys.iter().zip(lifts.iter()).any(|(k, l): (&(f64, f64), &Lift)| {
            (k.0 - key.0).abs() < NEAR_CROSSING
                && (k.1 - key.1).abs() < NEAR_CROSSING
                && differ_by_power(&l.conjugator, h, d_iso, ld, p_hat)
        });
        if duplicate {
            return true;
        }
        keys.push(key);
        lifts.push(Lift {
            element: word().free_reduced(),
            conjugator: h.clone(),
            line,
        });
        true
    };
    let mut inside = usize::from(consider(&Word::empty, &Isometry2::identity(), seg.distance(p), &mut lifts));

    // Breadth-first tree of side-pairing steps; words are rebuilt from parent
    // links only for the few elements that give lifts.
    let mut tree: Vec<(u32, u8)> = vec![(u32::MAX, 0)];
    let word_of = |tree: &[(u32, u8)], mut node: u32| -> Word {
        let mut steps = Vec::new();
        while node != 0 {
            let (parent, k) = tree[node as usize];
            steps.push(k as usize);
            node = parent;
        }
        steps
            .into_iter()
            .rev()
            .fold(Word::empty(), |w, k| w.concat(&frame.steps[k].0))
    };
    let mut frontier: Vec<(u32, Isometry2<f64>, usize)> = vec![(0, Isometry2::identity(), usize::MAX)];
    let mut counts = Vec::with_capacity(budget.max_radius);
    let mut frontier_sizes = Vec::with_capacity(budget.max_radius);
    let mut captured = Vec::with_capacity(budget.max_radius);
    let mut exhausted = false;
    for _radius in 1..=budget.max_radius {
        let mut next = Vec::new();
        for (node, h, last) in &frontier {
            for (k, (_, g)) in frame.steps.iter().enumerate() {
                if *last != usize::MAX && k == (*last ^ 1) {
                    continue;
                }
                let h2 = h * g;
                let q = h2.act(&p);
                let d_seg = seg.distance(q);
                if region(q, d_seg) > keep || !seen.insert(q) {
                    continue;
                }
                let id = tree.len() as u32;
                tree.push((*node, k as u8));
                let t = &tree;
                inside += usize::from(consider(&|| word_of(t, id), &h2, d_seg, &mut lifts));
                next.push((id, h2, k));
            }
        }
        counts.push(lifts.len());
        frontier_sizes.push(next.len());
        captured.push(inside);
        if next.is_empty() {
            exhausted = true;
            break;
        }
        if next.len() > FRONTIER_CAP {
            break;
        }
        frontier = next;
    }

    if !exhausted {
        // Both the lift count and the set of orbit points near the segment
        // must have settled.
        let n = counts.len();
        let settled = |v: &[usize]| v[n - budget.window..].iter().all(|&c| c == v[n - 1]);
        let stable = n >= budget.window && settled(&counts) && settled(&captured);
        if !stable {
            return Err(Error::BudgetExhausted {
                last: counts[n - 1],
                previous: if n >= 2 { counts[n - 2] } else { 0 },
            });
        }
    }
    Ok(Crossings {
        lifts,
        counts,
        frontier_sizes,
        captured,
        exhausted,
    })
}

/// Generic base point on the axis of `g` near `i` and its translate: the
/// half-open fundamental segment used for counting.
pub fn fundamental_segment(g: &Isometry2<f64>) -> Result<(Complex64, Complex64)> {
    let axis = g.axis()?;
    let l = g.translation_length()?;
    let base = axis.project(Complex64::new(0.0, 1.0));
    // Start half a period back, offset by an irrational fraction so the
    // endpoints stay away from special points.
    let q = axis.translation((std::f64::consts::FRAC_1_PI - 0.5) * l).act(&base);
    Ok((q, g.act(&q)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_set_dedupes_nearby_points() {
        let mut s = OrbitSet::new();
        let z = Complex64::new(0.3, 2.0);
        assert!(s.insert(z));
        assert!(!s.insert(z + Complex64::new(1e-9, 0.0)));
        assert!(s.insert(Complex64::new(0.3, 2.1)));
        // Across a cell boundary.
        let edge = Complex64::new(0.0, (CELL * 3.0).exp());
        assert!(s.insert(edge));
        assert!(!s.insert(edge * (1.0 - 1e-12)));
    }

    #[test]
    fn budget_validation() {
        assert!(EnumerationBudget::default().validate().is_ok());
        let bad = EnumerationBudget {
            max_radius: 1,
            window: 3,
            margin: 1.0,
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn centering_sends_point_to_i() {
        let z = Complex64::new(-1.3, 0.2);
        let w = centering(z).act(&z);
        assert!((w - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }
}

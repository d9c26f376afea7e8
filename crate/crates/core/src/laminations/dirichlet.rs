use std::f64::consts::PI;

use num_complex::Complex64;

use super::enumerate::{displacement, OrbitSet};
use crate::error::{Error, Result};
use crate::moebius::isometry::Isometry2;
use crate::moebius::line::distance;
use crate::surface::word::Word;

/// Dirichlet domain of the orbit of `i`, certified by its area.
#[derive(Debug, Clone)]
pub struct Dirichlet {
    /// Side pairings; the inverse of each follows it.
    pub sides: Vec<(Word, Isometry2<f64>)>,
    /// Largest distance from `i` to a vertex: every point of the plane lies
    /// this close to an orbit point.
    pub radius: f64,
    pub area: f64,
}

/// Relative area mismatch accepted as equality with `4π(g-1)`.
const AREA_TOL: f64 = 1e-8;
const LARGEST_BALL: f64 = 24.0;

/// Half-plane `k . u <= c` in the Klein model centred at `i`: the points
/// closer to `i` than to a given orbit point.
#[derive(Debug, Clone, Copy)]
struct Bisector {
    u: (f64, f64),
    c: f64,
}

impl Bisector {
    fn of(q: Complex64) -> Self {
        let i = Complex64::new(0.0, 1.0);
        let w = (q - i) / (q + i);
        let r = w.norm();
        Self {
            u: (w.re / r, w.im / r),
            c: r,
        }
    }

    fn excess(&self, k: (f64, f64)) -> f64 {
        k.0 * self.u.0 + k.1 * self.u.1 - self.c
    }
}

/// Convex polygon in the Klein model; `labels[j]` names the bisector
/// carrying the edge from vertex `j` to vertex `j + 1`.
struct Polygon {
    verts: Vec<(f64, f64)>,
    labels: Vec<Option<usize>>,
}

impl Polygon {
    fn square() -> Self {
        let s = 1.5;
        Self {
            verts: vec![(-s, -s), (s, -s), (s, s), (-s, s)],
            labels: vec![None; 4],
        }
    }

    fn clip(&mut self, b: &Bisector, label: usize) {
        if self.verts.iter().all(|&v| b.excess(v) <= 0.0) {
            return;
        }
        let n = self.verts.len();
        let mut verts = Vec::with_capacity(n + 1);
        let mut labels = Vec::with_capacity(n + 1);
        for j in 0..n {
            let (p, q) = (self.verts[j], self.verts[(j + 1) % n]);
            let (ep, eq) = (b.excess(p), b.excess(q));
            let cut = || {
                let s = ep / (ep - eq);
                (p.0 + s * (q.0 - p.0), p.1 + s * (q.1 - p.1))
            };
            match (ep <= 0.0, eq <= 0.0) {
                (true, true) => {
                    verts.push(p);
                    labels.push(self.labels[j]);
                }
                (true, false) => {
                    verts.push(p);
                    labels.push(self.labels[j]);
                    verts.push(cut());
                    labels.push(Some(label));
                }
                (false, true) => {
                    verts.push(cut());
                    labels.push(self.labels[j]);
                }
                (false, false) => {}
            }
        }
        self.verts = verts;
        self.labels = labels;
    }
}

/// Dirichlet domain for the group generated by `gens` (closed under
/// inverses), whose quotient has genus `genus`.
///
/// Orbit points in growing balls cut down a polygon containing the domain;
/// it is the domain once its area reaches that of the surface.
pub fn dirichlet_domain(gens: &[(Word, Isometry2<f64>)], genus: usize) -> Result<Dirichlet> {
    let target = 4.0 * PI * (genus as f64 - 1.0);
    let reach = gens.iter().map(|(_, g)| displacement(g)).fold(0.0, f64::max);
    let mut ball = (reach + 1.0).max(4.0);
    let mut last_area = f64::INFINITY;
    while ball <= LARGEST_BALL {
        let elems = orbit_ball(gens, ball, ball + 1.0);
        let bis: Vec<Bisector> = elems.iter().map(|e| Bisector::of(e.2)).collect();
        let mut poly = Polygon::square();
        for (k, b) in bis.iter().enumerate() {
            poly.clip(b, k);
        }
        if let Some((area, radius)) = measure(&poly, &bis) {
            last_area = area;
            if (area - target).abs() <= AREA_TOL * target {
                let mut labels: Vec<usize> = poly.labels.iter().flatten().copied().collect();
                labels.sort_unstable();
                labels.dedup();
                let mut sides: Vec<(Word, Isometry2<f64>)> = Vec::new();
                let i = Complex64::new(0.0, 1.0);
                for k in labels {
                    let (w, g, q) = &elems[k];
                    let known = sides.iter().any(|(_, h)| distance(h.act(&i), *q) < 1e-9);
                    if !known {
                        sides.push((w.clone(), g.clone()));
                        sides.push((w.inverse(), g.inverse()));
                    }
                }
                return Ok(Dirichlet { sides, radius, area });
            }
        }
        ball += 1.0;
    }
    Err(Error::Degenerate(format!(
        "Dirichlet domain not closed up within radius {LARGEST_BALL} (area {last_area}, expected {target})"
    )))
}

/// Area and circumradius of a compact polygon, `None` if it reaches the
/// boundary of the disc.
fn measure(poly: &Polygon, bis: &[Bisector]) -> Option<(f64, f64)> {
    // Drop edges of negligible length; the vertex then joins the edges on
    // either side.
    let n = poly.verts.len();
    let mut verts = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for j in 0..n {
        let (p, q) = (poly.verts[j], poly.verts[(j + 1) % n]);
        if (p.0 - q.0).hypot(p.1 - q.1) > 1e-13 {
            verts.push(p);
            labels.push(poly.labels[j]?);
        }
    }
    let m = verts.len();
    if m < 3 {
        return None;
    }
    let rmax = verts.iter().map(|v| v.0.hypot(v.1)).fold(0.0, f64::max);
    if rmax >= 1.0 - 1e-12 {
        return None;
    }
    // Inward normals (-c, -u) in Minkowski space; interior angle from their
    // pairing.
    let pair = |a: &Bisector, b: &Bisector| -a.c * b.c + a.u.0 * b.u.0 + a.u.1 * b.u.1;
    let mut angles = 0.0;
    for j in 0..m {
        let (a, b) = (&bis[labels[(j + m - 1) % m]], &bis[labels[j]]);
        let cos = -pair(a, b) / (pair(a, a) * pair(b, b)).sqrt();
        angles += cos.clamp(-1.0, 1.0).acos();
    }
    Some(((m as f64 - 2.0) * PI - angles, rmax.atanh()))
}

/// Elements moving `i` at most `radius`, found by a walk over `gens`
/// confined to the ball of radius `reach`; sorted by displacement.
fn orbit_ball(gens: &[(Word, Isometry2<f64>)], radius: f64, reach: f64) -> Vec<(Word, Isometry2<f64>, Complex64)> {
    let i = Complex64::new(0.0, 1.0);
    let mut seen = OrbitSet::new();
    seen.insert(i);
    let mut out = Vec::new();
    let mut frontier = vec![(Word::empty(), Isometry2::<f64>::identity())];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (w, h) in &frontier {
            for (gw, g) in gens {
                let h2 = h * g;
                let q = h2.act(&i);
                let d = displacement(&h2);
                if d > reach || !seen.insert(q) {
                    continue;
                }
                let w2 = w.concat(gw).free_reduced();
                if d <= radius {
                    out.push((w2.clone(), h2.clone(), q));
                }
                next.push((w2, h2));
            }
        }
        frontier = next;
    }
    out.sort_by(|a, b| displacement(&a.1).total_cmp(&displacement(&b.1)));
    out
}

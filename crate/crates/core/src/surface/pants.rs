use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::word::{handle_commutator, relator, CurveClass, Letter, Word};

/// How a pants curve enters the holonomy construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveRole {
    /// `b_i`, the non-separating curve inside handle `i`.
    Handle(usize),
    /// `[a_i, b_i]`, the boundary of handle `i`.
    HandleBoundary(usize),
    /// `[a_1, b_1] ... [a_k, b_k]`, the chain curve cutting off `k` handles.
    Chain(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PantsCurve {
    pub name: String,
    pub word: Word,
    pub role: CurveRole,
}

/// A pair of pants, listed by the indices of its three boundary curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PantsNode {
    pub boundary: [usize; 3],
}

/// Combinatorics of a pants decomposition of the closed genus-`g` surface
/// with generators `a_1, b_1, ..., a_g, b_g`.
///
/// Curve order: `b_1, ..., b_g`, then the handle boundaries `[a_i, b_i]`,
/// then the chain curves. In genus 2 the two handle boundaries coincide and
/// only `[a_1, b_1]` is listed:
/// `c1 = b1`, `c2 = b2`, `c3 = a1 b1 A1 B1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PantsGraph {
    pub genus: usize,
    pub curves: Vec<PantsCurve>,
    pub pants: Vec<PantsNode>,
}

impl PantsGraph {
    pub fn standard(genus: usize) -> Result<Self> {
        if genus < 2 {
            return Err(Error::Validation(format!("genus {genus} < 2")));
        }
        let mut curves = Vec::with_capacity(3 * genus - 3);
        for i in 1..=genus {
            curves.push(PantsCurve {
                name: String::new(),
                word: Word(vec![Letter::b(i)]),
                role: CurveRole::Handle(i),
            });
        }
        let boundaries = if genus == 2 { 1 } else { genus };
        for i in 1..=boundaries {
            curves.push(PantsCurve {
                name: String::new(),
                word: handle_commutator(i),
                role: CurveRole::HandleBoundary(i),
            });
        }
        for k in 2..genus.saturating_sub(1) {
            let mut v = Vec::new();
            for i in 1..=k {
                v.extend(handle_commutator(i).0);
            }
            curves.push(PantsCurve {
                name: String::new(),
                word: Word(v),
                role: CurveRole::Chain(k),
            });
        }
        for (j, c) in curves.iter_mut().enumerate() {
            c.name = format!("c{}", j + 1);
        }

        let g = genus;
        let boundary_index = |i: usize| if g == 2 { g } else { g + i - 1 };
        let mut pants = Vec::with_capacity(2 * g - 2);
        for i in 1..=g {
            pants.push(PantsNode {
                boundary: [i - 1, i - 1, boundary_index(i)],
            });
        }
        // Chain pants (D_k, e_{k+1}, D_{k+1}) for k = 1..g-2.
        let graph = Self {
            genus,
            curves,
            pants,
        };
        let mut pants = graph.pants.clone();
        for k in 1..=g.saturating_sub(2) {
            pants.push(PantsNode {
                boundary: [
                    graph.chain_curve_index(k),
                    boundary_index(k + 1),
                    graph.chain_curve_index(k + 1),
                ],
            });
        }
        let graph = Self { pants, ..graph };
        graph.validate()?;
        Ok(graph)
    }

    pub fn curve_count(&self) -> usize {
        self.curves.len()
    }

    pub fn handle_curve_index(&self, i: usize) -> usize {
        i - 1
    }

    /// Index of the handle-boundary curve `[a_i, b_i]` (in genus 2 both
    /// boundaries are the same curve).
    pub fn handle_boundary_index(&self, i: usize) -> usize {
        if self.genus == 2 {
            2
        } else {
            self.genus + i - 1
        }
    }

    /// Index of the curve cutting off the first `k` handles, `1 <= k < g`.
    pub fn chain_curve_index(&self, k: usize) -> usize {
        let g = self.genus;
        if k == 1 {
            self.handle_boundary_index(1)
        } else if k == g - 1 {
            self.handle_boundary_index(g)
        } else {
            2 * g + (k - 2)
        }
    }

    pub fn relator(&self) -> Word {
        relator(self.genus)
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.genus;
        if self.curves.len() != 3 * g - 3 {
            return Err(Error::Validation(format!(
                "expected {} pants curves, found {}",
                3 * g - 3,
                self.curves.len()
            )));
        }
        if self.pants.len() != 2 * g - 2 {
            return Err(Error::Validation(format!(
                "expected {} pants, found {}",
                2 * g - 2,
                self.pants.len()
            )));
        }
        let mut ends = vec![0usize; self.curves.len()];
        for p in &self.pants {
            for &c in &p.boundary {
                if c >= self.curves.len() {
                    return Err(Error::Validation(format!("pants refers to missing curve {c}")));
                }
                ends[c] += 1;
            }
        }
        if let Some(j) = ends.iter().position(|&n| n != 2) {
            return Err(Error::Validation(format!(
                "curve {} has {} incident pants ends",
                self.curves[j].name, ends[j]
            )));
        }
        let r = self.relator();
        if r.len() != 4 * g || r.free_reduced().len() != 4 * g {
            return Err(Error::Validation("malformed relator".into()));
        }
        for c in &self.curves {
            if c.word.is_empty() || c.word.max_handle() > g {
                return Err(Error::Validation(format!("bad word for curve {}", c.name)));
            }
        }
        Ok(())
    }

    pub fn curve_by_name(&self, name: &str) -> Option<usize> {
        self.curves.iter().position(|c| c.name == name)
    }

    /// Pants curve `j` as a curve class.
    pub fn curve_class(&self, j: usize) -> CurveClass {
        CurveClass::new(self.curves[j].name.clone(), self.curves[j].word.clone()).expect("pants curves are nontrivial")
    }

    /// Curves whose lengths are tracked as the length spectrum: the pants
    /// curves, then `a_i`, `a_i b_i`, `a_i a_{i+1}` and `b_i b_{i+1}`.
    ///
    /// In genus 2 these are nine curves, two of which (`a1 a2`, `b1 b2`)
    /// cross the separating curve.
    pub fn marking_set(&self) -> Vec<CurveClass> {
        let g = self.genus;
        let mut out: Vec<CurveClass> = (0..self.curve_count()).map(|j| self.curve_class(j)).collect();
        let word = |v: Vec<Letter>| {
            let w = Word(v);
            CurveClass::new(w.to_string(), w).expect("nontrivial")
        };
        out.extend((1..=g).map(|i| word(vec![Letter::a(i)])));
        out.extend((1..=g).map(|i| word(vec![Letter::a(i), Letter::b(i)])));
        out.extend((1..g).map(|i| word(vec![Letter::a(i), Letter::a(i + 1)])));
        out.extend((1..g).map(|i| word(vec![Letter::b(i), Letter::b(i + 1)])));
        out
    }
}

/// Length/twist coordinates on the pants curves of a [`PantsGraph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FenchelNielsen {
    pub lengths: Vec<f64>,
    pub twists: Vec<f64>,
}

impl FenchelNielsen {
    pub fn new(lengths: Vec<f64>, twists: Vec<f64>) -> Self {
        Self { lengths, twists }
    }

    pub fn uniform(genus: usize, length: f64) -> Self {
        let n = 3 * genus - 3;
        Self::new(vec![length; n], vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn validate(&self, topo: &PantsGraph) -> Result<()> {
        let n = topo.curve_count();
        if self.lengths.len() != n || self.twists.len() != n {
            return Err(Error::Validation(format!(
                "expected {n} lengths and twists, found {} and {}",
                self.lengths.len(),
                self.twists.len()
            )));
        }
        for (j, &l) in self.lengths.iter().enumerate() {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::Validation(format!(
                    "length of {} must be positive and finite, got {l}",
                    topo.curves[j].name
                )));
            }
        }
        if let Some(t) = self.twists.iter().find(|t| !t.is_finite()) {
            return Err(Error::Validation(format!("twist {t} is not finite")));
        }
        Ok(())
    }

    /// Adds `delta[j]` to twist `j`.
    pub fn twisted(&self, delta: &[f64]) -> Self {
        let mut out = self.clone();
        for (t, d) in out.twists.iter_mut().zip(delta) {
            *t += d;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_two_standard_words() {
        let p = PantsGraph::standard(2).unwrap();
        let words: Vec<String> = p.curves.iter().map(|c| c.word.to_string()).collect();
        assert_eq!(words, ["b1", "b2", "a1 b1 A1 B1"]);
        assert_eq!(p.pants.len(), 2);
        assert_eq!(p.chain_curve_index(1), 2);
        let m: Vec<String> = p.marking_set().iter().map(|c| c.word.to_string()).collect();
        assert_eq!(m, ["b1", "b2", "a1 b1 A1 B1", "a1", "a2", "a1 b1", "a2 b2", "a1 a2", "b1 b2"]);
    }

    #[test]
    fn higher_genus_counts() {
        for g in 3..=5 {
            let p = PantsGraph::standard(g).unwrap();
            assert_eq!(p.curves.len(), 3 * g - 3);
            assert_eq!(p.pants.len(), 2 * g - 2);
        }
        assert!(PantsGraph::standard(1).is_err());
    }

    #[test]
    fn fn_validation() {
        let p = PantsGraph::standard(2).unwrap();
        assert!(FenchelNielsen::uniform(2, 1.5).validate(&p).is_ok());
        let bad = FenchelNielsen::new(vec![1.0, 0.0, 1.0], vec![0.0; 3]);
        assert!(matches!(bad.validate(&p), Err(Error::Validation(_))));
        let short = FenchelNielsen::new(vec![1.0; 2], vec![0.0; 2]);
        assert!(short.validate(&p).is_err());
    }
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::pants::{FenchelNielsen, PantsGraph};
use crate::surface::word::{CurveClass, Word};

/// JSON form of a marked surface: coordinates on the standard pants
/// decomposition plus named curves.
///
/// `curve_words` must list the pants curves by name with their standard
/// words; further entries name extra curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDoc {
    pub genus: usize,
    pub lengths: Vec<f64>,
    pub twists: Vec<f64>,
    #[serde(default)]
    pub curve_words: BTreeMap<String, String>,
}

impl SurfaceDoc {
    pub fn new(topo: &PantsGraph, coords: &FenchelNielsen) -> Self {
        let curve_words = topo
            .curves
            .iter()
            .map(|c| (c.name.clone(), c.word.to_string()))
            .collect();
        Self {
            genus: topo.genus,
            lengths: coords.lengths.clone(),
            twists: coords.twists.clone(),
            curve_words,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Checked decomposition and coordinates.
    pub fn parts(&self) -> Result<(PantsGraph, FenchelNielsen)> {
        let topo = PantsGraph::standard(self.genus)?;
        for (name, w) in &self.curve_words {
            let word = Word::parse(w)?;
            if let Some(j) = topo.curve_by_name(name) {
                if word != topo.curves[j].word {
                    return Err(Error::Parse(format!(
                        "curve {name} is {w}, expected {}",
                        topo.curves[j].word
                    )));
                }
            } else if word.max_handle() > self.genus {
                return Err(Error::Parse(format!("curve {name} = {w} uses a generator beyond genus {}", self.genus)));
            }
        }
        let coords = FenchelNielsen::new(self.lengths.clone(), self.twists.clone());
        coords.validate(&topo)?;
        Ok((topo, coords))
    }

    /// Curve by name from `curve_words`, or parsed as an inline word.
    pub fn curve(&self, key: &str) -> Result<CurveClass> {
        match self.curve_words.get(key) {
            Some(w) => CurveClass::named(key, w),
            None => CurveClass::parse(key),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_checks() {
        let topo = PantsGraph::standard(2).unwrap();
        let doc = SurfaceDoc::new(&topo, &FenchelNielsen::uniform(2, 1.5));
        let back = SurfaceDoc::from_json(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(back, doc);
        assert!(back.parts().is_ok());
        assert_eq!(back.curve("c3").unwrap().word.to_string(), "a1 b1 A1 B1");
        let mut bad = doc.clone();
        bad.curve_words.insert("c1".into(), "a1".into());
        assert!(matches!(bad.parts(), Err(Error::Parse(_))));
        let mut bad = doc;
        bad.curve_words.insert("x".into(), "a1 q7".into());
        assert!(bad.parts().is_err());
    }
}

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Generator or inverse generator of the surface group.
///
/// Generator `k >= 1` is `a_{(k+1)/2}` for odd `k` and `b_{k/2}` for even
/// `k`; the sign encodes inversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub i16);

impl Letter {
    pub fn a(i: usize) -> Self {
        Letter((2 * i - 1) as i16)
    }

    pub fn b(i: usize) -> Self {
        Letter((2 * i) as i16)
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    /// Zero-based generator index.
    pub fn generator(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    /// Handle index `i` of `a_i` / `b_i`.
    pub fn handle(self) -> usize {
        self.generator() / 2 + 1
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let is_a = self.generator() % 2 == 0;
        let c = match (is_a, self.is_inverse()) {
            (true, false) => 'a',
            (true, true) => 'A',
            (false, false) => 'b',
            (false, true) => 'B',
        };
        write!(f, "{c}{}", self.handle())
    }
}

/// Word in the generators `a_i, b_i` and their inverses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses tokens like `a1 b1 A1 B1` (capital letters are inverses).
    /// Whitespace between tokens is optional.
    pub fn parse(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() || c == '*' || c == '.' {
                i += 1;
                continue;
            }
            let (is_a, inv) = match c {
                'a' => (true, false),
                'A' => (true, true),
                'b' => (false, false),
                'B' => (false, true),
                _ => return Err(Error::Parse(format!("bad token {c:?} in word {s:?}"))),
            };
            let start = i + 1;
            let mut end = start;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            if end == start {
                return Err(Error::Parse(format!("missing handle index in word {s:?}")));
            }
            let handle: usize = s[start..end]
                .parse()
                .map_err(|_| Error::Parse(format!("bad handle index in word {s:?}")))?;
            if handle == 0 || handle > 1000 {
                return Err(Error::Parse(format!("handle index {handle} out of range")));
            }
            let l = if is_a { Letter::a(handle) } else { Letter::b(handle) };
            letters.push(if inv { l.inverse() } else { l });
            i = end;
        }
        Ok(Word(letters))
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v).free_reduced()
    }

    pub fn power(&self, n: i32) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::new();
        for _ in 0..n.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Word(v).free_reduced()
    }

    pub fn conjugate_by(&self, h: &Word) -> Self {
        h.concat(self).concat(&h.inverse())
    }

    pub fn free_reduced(&self) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn cyclically_reduced(&self) -> Self {
        let w = self.free_reduced().0;
        let mut lo = 0;
        let mut hi = w.len();
        while hi - lo >= 2 && w[lo] == w[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        Word(w[lo..hi].to_vec())
    }

    pub fn rotated(&self, k: usize) -> Self {
        if self.0.is_empty() {
            return self.clone();
        }
        let k = k % self.0.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    /// Largest handle index used.
    pub fn max_handle(&self) -> usize {
        self.0.iter().map(|l| l.handle()).max().unwrap_or(0)
    }

    /// Applies a substitution of generators, `image[k]` being the image of
    /// generator `k`.
    pub fn substitute(&self, image: &[Word]) -> Self {
        let mut v = Vec::new();
        for &l in &self.0 {
            let w = &image[l.generator()];
            if l.is_inverse() {
                v.extend(w.inverse().0);
            } else {
                v.extend_from_slice(&w.0);
            }
        }
        Word(v).free_reduced()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.0 {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
            first = false;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Free homotopy class of a closed curve, stored as a cyclically reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveClass {
    pub name: String,
    pub word: Word,
}

impl CurveClass {
    pub fn new(name: impl Into<String>, word: Word) -> Result<Self> {
        let word = word.cyclically_reduced();
        if word.is_empty() {
            return Err(Error::Validation("curve word reduces to the identity".into()));
        }
        Ok(Self {
            name: name.into(),
            word,
        })
    }

    /// Parses a word; the display name is the word itself.
    pub fn parse(s: &str) -> Result<Self> {
        let word = Word::parse(s)?;
        let reduced = word.cyclically_reduced();
        Self::new(reduced.to_string(), word)
    }

    pub fn named(name: &str, s: &str) -> Result<Self> {
        Self::new(name, Word::parse(s)?)
    }

    pub fn inverse(&self) -> Self {
        Self {
            name: format!("{}^-1", self.name),
            word: self.word.inverse(),
        }
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// The relator `[a_1, b_1] ... [a_g, b_g]` with `[a, b] = a b a^-1 b^-1`.
pub fn relator(genus: usize) -> Word {
    let mut v = Vec::with_capacity(4 * genus);
    for i in 1..=genus {
        v.extend([Letter::a(i), Letter::b(i), Letter::a(i).inverse(), Letter::b(i).inverse()]);
    }
    Word(v)
}

/// Commutator word `[a_i, b_i]`.
pub fn handle_commutator(i: usize) -> Word {
    Word(vec![Letter::a(i), Letter::b(i), Letter::a(i).inverse(), Letter::b(i).inverse()])
}

/// All freely reduced words of length exactly `len` over `genus` handles.
pub fn reduced_words(genus: usize, len: usize) -> Vec<Word> {
    let gens: Vec<Letter> = (1..=2 * genus as i16).flat_map(|k| [Letter(k), Letter(-k)]).collect();
    let mut layer = vec![Word::empty()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(layer.len() * (gens.len() - 1));
        for w in &layer {
            for &g in &gens {
                if w.0.last() == Some(&g.inverse()) {
                    continue;
                }
                let mut v = w.0.clone();
                v.push(g);
                next.push(Word(v));
            }
        }
        layer = next;
    }
    layer
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_roundtrip() {
        let w = Word::parse("a1 b1 A1 B1").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.to_string(), "a1 b1 A1 B1");
        assert_eq!(Word::parse("a1b1A1B1").unwrap(), w);
        assert_eq!(w, handle_commutator(1));
        assert!(Word::parse("a1 c2").is_err());
        assert!(Word::parse("a").is_err());
        assert!(Word::parse("a0").is_err());
    }

    #[test]
    fn reductions() {
        let w = Word::parse("b2 a1 A1 b1 B2").unwrap();
        assert_eq!(w.free_reduced().to_string(), "b2 b1 B2");
        assert_eq!(w.cyclically_reduced().to_string(), "b1");
        assert!(CurveClass::parse("a1 A1").is_err());
    }

    #[test]
    fn inverse_and_powers() {
        let w = Word::parse("a1 b2").unwrap();
        assert_eq!(w.inverse().to_string(), "B2 A1");
        assert_eq!(w.power(2).to_string(), "a1 b2 a1 b2");
        assert!(w.concat(&w.inverse()).is_empty());
        assert_eq!(w.power(-1), w.inverse());
    }

    #[test]
    fn reduced_word_counts() {
        // 4g generators, 4g - 1 continuations.
        assert_eq!(reduced_words(2, 1).len(), 8);
        assert_eq!(reduced_words(2, 3).len(), 8 * 7 * 7);
    }

    #[test]
    fn substitution_is_a_homomorphism() {
        let images = vec![
            Word::parse("a1 b1").unwrap(),
            Word::parse("b1").unwrap(),
            Word::parse("a2").unwrap(),
            Word::parse("b2").unwrap(),
        ];
        let w = Word::parse("a1 B1").unwrap();
        assert_eq!(w.substitute(&images).to_string(), "a1");
    }
}

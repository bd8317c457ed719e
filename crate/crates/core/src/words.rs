//! Reduced words in free groups and finite-support vectors in free abelian
//! groups, over an arbitrary generator type.
//!
//! Words are kept in syllable form `x_1^k_1 ... x_n^k_n` with nonzero
//! exponents and distinct adjacent generators. The number of syllables is the
//! quantity that the limit decomposition tracks, so it is stored directly
//! rather than recovered from a letter sequence.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub type Exponent = i64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("generator `{0}` has no image")]
    UnmappedFiber(String),
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

fn add(a: Exponent, b: Exponent) -> Result<Exponent, WordError> {
    a.checked_add(b).ok_or(WordError::ExponentOverflow)
}

/// A reduced free-group word. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word<G> {
    syllables: Vec<(G, Exponent)>,
}

impl<G> Default for Word<G> {
    fn default() -> Self {
        Word { syllables: Vec::new() }
    }
}

impl<G: Clone + Eq> Word<G> {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn generator(g: G) -> Self {
        Word { syllables: vec![(g, 1)] }
    }

    /// `g^k` as a reduced word.
    pub fn power_of(g: G, k: Exponent) -> Self {
        if k == 0 {
            Word::identity()
        } else {
            Word { syllables: vec![(g, k)] }
        }
    }

    /// Freely reduces a raw syllable sequence: adjacent syllables on the same
    /// generator are merged and zero exponents dropped, until nothing changes.
    pub fn reduce<I: IntoIterator<Item = (G, Exponent)>>(raw: I) -> Result<Self, WordError> {
        let mut out: Vec<(G, Exponent)> = Vec::new();
        for (g, k) in raw {
            if k == 0 {
                continue;
            }
            match out.last_mut() {
                Some((top, e)) if *top == g => {
                    *e = add(*e, k)?;
                    if *e == 0 {
                        out.pop();
                    }
                }
                _ => out.push((g, k)),
            }
        }
        Ok(Word { syllables: out })
    }

    pub fn syllables(&self) -> &[(G, Exponent)] {
        &self.syllables
    }

    pub fn into_syllables(self) -> Vec<(G, Exponent)> {
        self.syllables
    }

    /// Number of syllables.
    pub fn syllable_length(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, WordError> {
        Word::reduce(self.syllables.iter().chain(&other.syllables).cloned())
    }

    pub fn invert(&self) -> Self {
        Word { syllables: self.syllables.iter().rev().map(|(g, k)| (g.clone(), -k)).collect() }
    }

    pub fn pow(&self, k: Exponent) -> Result<Self, WordError> {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut acc = Word::identity();
        for _ in 0..k.unsigned_abs() {
            acc = acc.multiply(&base)?;
        }
        Ok(acc)
    }

    /// Image under the homomorphism determined by a map on generators.
    pub fn map_generators<H, F>(&self, mut f: F) -> Result<Word<H>, WordError>
    where
        H: Clone + Eq,
        F: FnMut(&G) -> Option<H>,
        G: fmt::Debug,
    {
        let raw = self
            .syllables
            .iter()
            .map(|(g, k)| f(g).map(|h| (h, *k)).ok_or_else(|| WordError::UnmappedFiber(format!("{g:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Word::reduce(raw)
    }
}

/// A finite-support integer vector: an element of the free abelian group on
/// `G`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianVector<G: Ord> {
    entries: BTreeMap<G, Exponent>,
}

impl<G: Ord> Default for AbelianVector<G> {
    fn default() -> Self {
        AbelianVector { entries: BTreeMap::new() }
    }
}

impl<G: Ord + Clone> AbelianVector<G> {
    pub fn zero() -> Self {
        AbelianVector::default()
    }

    pub fn unit(g: G) -> Self {
        AbelianVector { entries: BTreeMap::from([(g, 1)]) }
    }

    /// Sums coefficients per generator and drops zeros.
    pub fn from_terms<I: IntoIterator<Item = (G, Exponent)>>(terms: I) -> Result<Self, WordError> {
        let mut entries = BTreeMap::new();
        for (g, k) in terms {
            let e = entries.entry(g).or_insert(0);
            *e = add(*e, k)?;
        }
        entries.retain(|_, k| *k != 0);
        Ok(AbelianVector { entries })
    }

    pub fn entries(&self) -> &BTreeMap<G, Exponent> {
        &self.entries
    }

    pub fn coefficient(&self, g: &G) -> Exponent {
        self.entries.get(g).copied().unwrap_or(0)
    }

    /// Size of the support.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self, WordError> {
        Self::from_terms(self.entries.iter().chain(&other.entries).map(|(g, k)| (g.clone(), *k)))
    }

    pub fn negate(&self) -> Self {
        AbelianVector { entries: self.entries.iter().map(|(g, k)| (g.clone(), -k)).collect() }
    }

    pub fn scale(&self, k: Exponent) -> Result<Self, WordError> {
        let terms = self
            .entries
            .iter()
            .map(|(g, c)| c.checked_mul(k).map(|v| (g.clone(), v)).ok_or(WordError::ExponentOverflow))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_terms(terms)
    }

    /// Push-forward along a map on generators, summing coefficients of keys
    /// that collapse together.
    pub fn map_generators<H, F>(&self, mut f: F) -> Result<AbelianVector<H>, WordError>
    where
        H: Ord + Clone,
        F: FnMut(&G) -> Option<H>,
        G: fmt::Debug,
    {
        let terms = self
            .entries
            .iter()
            .map(|(g, k)| f(g).map(|h| (h, *k)).ok_or_else(|| WordError::UnmappedFiber(format!("{g:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        AbelianVector::from_terms(terms)
    }
}

/// Formats as `a^2.b^-1.c`; the identity is the empty string.
impl<G: fmt::Display> fmt::Display for Word<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (g, k)) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            if *k == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{k}")?;
            }
        }
        Ok(())
    }
}

/// Formats as `{a:2,b:-1}`.
impl<G: Ord + fmt::Display> fmt::Display for AbelianVector<G> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (g, k)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{g}:{k}")?;
        }
        f.write_str("}")
    }
}

fn parse_err(input: &str, reason: &str) -> WordError {
    WordError::Parse { input: input.to_string(), reason: reason.to_string() }
}

/// Raw syllables of a word literal such as `a^2.b^-1.c`. Not reduced.
pub fn parse_raw_word(s: &str) -> Result<Vec<(String, Exponent)>, WordError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split('.')
        .map(|syl| {
            let (g, k) = match syl.split_once('^') {
                Some((g, k)) => (g, k.parse().map_err(|_| parse_err(s, "bad exponent"))?),
                None => (syl, 1),
            };
            if g.is_empty() {
                return Err(parse_err(s, "empty generator"));
            }
            Ok((g.to_string(), k))
        })
        .collect()
}

impl FromStr for Word<String> {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::reduce(parse_raw_word(s)?)
    }
}

impl FromStr for AbelianVector<String> {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| parse_err(s, "expected {..}"))?;
        if inner.trim().is_empty() {
            return Ok(AbelianVector::zero());
        }
        let terms = inner
            .split(',')
            .map(|t| {
                let (g, k) = t.rsplit_once(':').ok_or_else(|| parse_err(s, "expected gen:coeff"))?;
                let g = g.trim();
                if g.is_empty() {
                    return Err(parse_err(s, "empty generator"));
                }
                Ok((g.to_string(), k.trim().parse().map_err(|_| parse_err(s, "bad coefficient"))?))
            })
            .collect::<Result<Vec<_>, _>>()?;
        AbelianVector::from_terms(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word<String> {
        s.parse().unwrap()
    }

    fn v(s: &str) -> AbelianVector<String> {
        s.parse().unwrap()
    }

    #[test]
    fn cancellation() {
        let raw = [("a", 1), ("b", 1), ("b", -1), ("c", 1)].map(|(g, k)| (g.to_string(), k));
        assert_eq!(Word::reduce(raw).unwrap(), w("a.c"));
        assert_eq!(Word::<String>::reduce([]).unwrap(), Word::identity());
    }

    #[test]
    fn cascade_and_zero_exponents() {
        let raw = [("a", 2), ("b", 0), ("b", 3), ("c", 1), ("c", -1), ("b", -3), ("a", -2)];
        assert!(Word::reduce(raw.map(|(g, k)| (g, k))).unwrap().is_identity());
    }

    #[test]
    fn identity_laws() {
        let x = w("a^2.b^-1");
        assert_eq!(x.multiply(&Word::identity()).unwrap(), x);
        assert!(w("a").multiply(&w("a^-1")).unwrap().is_identity());
    }

    #[test]
    fn inversion() {
        assert!(Word::<String>::identity().invert().is_identity());
        assert_eq!(w("a^2.b^-1").invert(), w("b.a^-2"));
    }

    #[test]
    fn syllable_counts() {
        assert_eq!(w("").syllable_length(), 0);
        assert_eq!(w("a^5").syllable_length(), 1);
        assert_eq!(w("a.b.a^-2").syllable_length(), 3);
    }

    #[test]
    fn collapsing_generators() {
        let x = w("a.b");
        let c = x.map_generators(|_| Some("c".to_string())).unwrap();
        assert_eq!(c, w("c^2"));
        assert_eq!(x.map_generators(|g| Some(g.clone())).unwrap(), x);
        let err = x.map_generators(|g| (g == "a").then(|| "c".to_string())).unwrap_err();
        assert!(matches!(err, WordError::UnmappedFiber(_)));
    }

    #[test]
    fn overflow_is_an_error() {
        let raw = [("a", Exponent::MAX), ("a", 1)];
        assert_eq!(Word::reduce(raw), Err(WordError::ExponentOverflow));
    }

    #[test]
    fn pow_matches_repeated_product() {
        let x = w("a.b^-1");
        assert_eq!(x.pow(3).unwrap(), x.multiply(&x).unwrap().multiply(&x).unwrap());
        assert_eq!(x.pow(-2).unwrap(), x.invert().multiply(&x.invert()).unwrap());
        assert!(x.pow(0).unwrap().is_identity());
    }

    #[test]
    fn abelian_basics() {
        let x = v("{a:1,b:-1}");
        assert!(x.add(&x.negate()).unwrap().is_zero());
        assert!(x.map_generators(|_| Some("c".to_string())).unwrap().is_zero());
        let y = v("{a:2,b:-1}").map_generators(|_| Some("c".to_string())).unwrap();
        assert_eq!(y, v("{c:1}"));
        assert_eq!(v("{}"), AbelianVector::zero());
        assert_eq!(v("{a:0}"), AbelianVector::zero());
    }

    #[test]
    fn literal_round_trip() {
        for s in ["", "a", "a^2.b^-1.c", "x1^-3.x2"] {
            assert_eq!(w(s).to_string(), s);
        }
        assert_eq!(v("{b:-1,a:2}").to_string(), "{a:2,b:-1}");
        assert!("a^x".parse::<Word<String>>().is_err());
        assert!("a..b".parse::<Word<String>>().is_err());
        assert!("a:1".parse::<AbelianVector<String>>().is_err());
    }
}

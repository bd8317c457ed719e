//! Free and free abelian groups induced by an inverse system of sets, and
//! elements of their inverse limits.
//!
//! Over a point `p` the group is free (or free abelian) on the fiber `A_p`;
//! the connecting homomorphism `h_{p,q}` sends the generator for `a` to the
//! generator for `f_{p,q}(a)`. A limit element is a coherent family
//! `(g_p)` with `h_{p,q}(g_q) = g_p`, held either as a table over every
//! loaded point or as an evaluator that is probed (and checked) on demand.

mod decompose;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::invsys::{FiberIdx, InverseSystem, SystemError, Thread};
use crate::poset::{Point, PosetError};
use crate::words::{AbelianVector, Exponent, Word, WordError};

pub use decompose::{Certificate, Decomposition, Stabilization, StabilizationParams};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LimitError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("expected a {expected:?} element")]
    VariantMismatch { expected: Variant },
    #[error("generator index {index} is outside the fiber over `{point}`")]
    BadGenerator { point: String, index: FiberIdx },
    #[error("expected one value per point ({expected}), got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("h_{{{p},{q}}}(g_{q}) != g_{p}")]
    Incoherent { p: String, q: String },
    #[error("syllable lengths did not settle within {probes} probes")]
    Unstable { probes: usize },
    #[error("adjacent terms {0} and {1} use the same thread")]
    NotSeparable(usize, usize),
    #[error("empty product has no freeness witness")]
    EmptyProduct,
    #[error("decomposition invariant failed: {0}")]
    ClaimViolated(String),
    #[error("no value for `{0}`")]
    MissingValue(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Free,
    Abelian,
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "free" => Ok(Variant::Free),
            "abelian" => Ok(Variant::Abelian),
            other => Err(format!("unknown variant `{other}`")),
        }
    }
}

/// An element of one of the groups `G_p`, over fiber indices of `A_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupElem {
    Free(Word<FiberIdx>),
    Abelian(AbelianVector<FiberIdx>),
}

impl GroupElem {
    pub fn identity(variant: Variant) -> Self {
        match variant {
            Variant::Free => GroupElem::Free(Word::identity()),
            Variant::Abelian => GroupElem::Abelian(AbelianVector::zero()),
        }
    }

    pub fn generator(variant: Variant, a: FiberIdx) -> Self {
        match variant {
            Variant::Free => GroupElem::Free(Word::generator(a)),
            Variant::Abelian => GroupElem::Abelian(AbelianVector::unit(a)),
        }
    }

    pub fn variant(&self) -> Variant {
        match self {
            GroupElem::Free(_) => Variant::Free,
            GroupElem::Abelian(_) => Variant::Abelian,
        }
    }

    /// Syllable length for words, support size for vectors.
    pub fn complexity(&self) -> usize {
        match self {
            GroupElem::Free(w) => w.syllable_length(),
            GroupElem::Abelian(v) => v.support_len(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.complexity() == 0
    }

    /// Generators that occur, in word order (free) or key order (abelian).
    pub fn generators(&self) -> Vec<FiberIdx> {
        match self {
            GroupElem::Free(w) => w.syllables().iter().map(|s| s.0).collect(),
            GroupElem::Abelian(v) => v.entries().keys().copied().collect(),
        }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, LimitError> {
        match (self, other) {
            (GroupElem::Free(a), GroupElem::Free(b)) => Ok(GroupElem::Free(a.multiply(b)?)),
            (GroupElem::Abelian(a), GroupElem::Abelian(b)) => Ok(GroupElem::Abelian(a.add(b)?)),
            _ => Err(LimitError::VariantMismatch { expected: self.variant() }),
        }
    }

    pub fn invert(&self) -> Self {
        match self {
            GroupElem::Free(w) => GroupElem::Free(w.invert()),
            GroupElem::Abelian(v) => GroupElem::Abelian(v.negate()),
        }
    }

    pub fn pow(&self, k: Exponent) -> Result<Self, LimitError> {
        Ok(match self {
            GroupElem::Free(w) => GroupElem::Free(w.pow(k)?),
            GroupElem::Abelian(v) => GroupElem::Abelian(v.scale(k)?),
        })
    }

    /// Image under the homomorphism induced by `f` on generators.
    pub fn map_generators(&self, f: impl Fn(FiberIdx) -> FiberIdx) -> Result<Self, LimitError> {
        Ok(match self {
            GroupElem::Free(w) => GroupElem::Free(w.map_generators(|&a| Some(f(a)))?),
            GroupElem::Abelian(v) => GroupElem::Abelian(v.map_generators(|&a| Some(f(a)))?),
        })
    }
}

/// Evaluates a limit element at a loaded point.
pub type Evaluator = Arc<dyn Fn(Point) -> Result<GroupElem, LimitError> + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Eager(Arc<Vec<GroupElem>>),
    Lazy { eval: Evaluator, cache: Arc<Mutex<BTreeMap<Point, GroupElem>>> },
}

/// An element of the inverse limit.
///
/// Eager elements were checked for coherence on every comparable pair when
/// built. Lazy elements are only known to be coherent on the pairs that have
/// been probed so far; results derived from them assume the evaluator is a
/// genuine limit element.
#[derive(Clone)]
pub struct LimitElement {
    repr: Repr,
}

impl fmt::Debug for LimitElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Eager(v) => f.debug_tuple("Eager").field(v).finish(),
            Repr::Lazy { cache, .. } => {
                let probed = cache.lock().map(|c| c.len()).unwrap_or(0);
                f.debug_struct("Lazy").field("probed", &probed).finish()
            }
        }
    }
}

impl LimitElement {
    pub fn is_eager(&self) -> bool {
        matches!(self.repr, Repr::Eager(_))
    }

    /// Values of an eager element, one per loaded point.
    pub fn values(&self) -> Option<&[GroupElem]> {
        match &self.repr {
            Repr::Eager(v) => Some(v),
            Repr::Lazy { .. } => None,
        }
    }

    /// Points probed so far (lazy) or every point (eager).
    pub fn probed_points(&self) -> Vec<Point> {
        match &self.repr {
            Repr::Eager(v) => (0..v.len()).collect(),
            Repr::Lazy { cache, .. } => cache.lock().expect("probe cache poisoned").keys().copied().collect(),
        }
    }

    fn raw(&self) -> Evaluator {
        match &self.repr {
            Repr::Eager(v) => {
                let v = Arc::clone(v);
                Arc::new(move |p| Ok(v[p].clone()))
            }
            Repr::Lazy { eval, .. } => Arc::clone(eval),
        }
    }
}

/// The free or free abelian group system induced by an inverse system of sets.
#[derive(Debug, Clone)]
pub struct GroupSystem {
    carrier: InverseSystem,
    variant: Variant,
}

impl GroupSystem {
    pub fn new(carrier: InverseSystem, variant: Variant) -> Self {
        GroupSystem { carrier, variant }
    }

    pub fn carrier(&self) -> &InverseSystem {
        &self.carrier
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Rank of the free group over `p`.
    pub fn rank(&self, p: Point) -> usize {
        self.carrier.fiber(p).len()
    }

    /// `h_{p,q}(g)` for `g` in `G_q`.
    pub fn connect(&self, p: Point, q: Point, g: &GroupElem) -> Result<GroupElem, LimitError> {
        g.map_generators(|a| self.carrier.map(p, q, a))
    }

    fn point_name(&self, p: Point) -> String {
        self.carrier.base().name(p).to_string()
    }

    fn check_value(&self, p: Point, g: &GroupElem) -> Result<(), LimitError> {
        if g.variant() != self.variant {
            return Err(LimitError::VariantMismatch { expected: self.variant });
        }
        match g.generators().into_iter().find(|&a| a >= self.rank(p)) {
            Some(index) => Err(LimitError::BadGenerator { point: self.point_name(p), index }),
            None => Ok(()),
        }
    }

    fn check_pair(&self, p: Point, q: Point, gp: &GroupElem, gq: &GroupElem) -> Result<(), LimitError> {
        if &self.connect(p, q, gq)? != gp {
            return Err(LimitError::Incoherent { p: self.point_name(p), q: self.point_name(q) });
        }
        Ok(())
    }

    /// Checks `h_{p,q}(g_q) = g_p` on every comparable pair of an eager
    /// element, or on every probed pair of a lazy one.
    pub fn check_coherence(&self, g: &LimitElement) -> Result<(), LimitError> {
        match &g.repr {
            Repr::Eager(v) => {
                for (p, q) in self.carrier.base().comparable_pairs() {
                    self.check_pair(p, q, &v[p], &v[q])?;
                }
                Ok(())
            }
            Repr::Lazy { cache, .. } => {
                let cache = cache.lock().expect("probe cache poisoned");
                let base = self.carrier.base();
                for (&p, gp) in cache.iter() {
                    for (&q, gq) in cache.iter().filter(|(&q, _)| base.leq(p, q)) {
                        self.check_pair(p, q, gp, gq)?;
                    }
                }
                Ok(())
            }
        }
    }

    /// An eager element from one value per loaded point.
    pub fn eager(&self, values: Vec<GroupElem>) -> Result<LimitElement, LimitError> {
        let n = self.carrier.base().len();
        if values.len() != n {
            return Err(LimitError::WrongArity { expected: n, got: values.len() });
        }
        for (p, g) in values.iter().enumerate() {
            self.check_value(p, g)?;
        }
        let g = LimitElement { repr: Repr::Eager(Arc::new(values)) };
        self.check_coherence(&g)?;
        Ok(g)
    }

    /// A lazy element. Each new probe is checked against every earlier probe
    /// it is comparable with.
    pub fn lazy(&self, eval: Evaluator) -> LimitElement {
        LimitElement { repr: Repr::Lazy { eval, cache: Arc::new(Mutex::new(BTreeMap::new())) } }
    }

    /// `g_p`.
    pub fn evaluate(&self, g: &LimitElement, p: Point) -> Result<GroupElem, LimitError> {
        match &g.repr {
            Repr::Eager(v) => Ok(v[p].clone()),
            Repr::Lazy { eval, cache } => {
                let mut cache = cache.lock().expect("probe cache poisoned");
                if let Some(v) = cache.get(&p) {
                    return Ok(v.clone());
                }
                let value = eval(p)?;
                self.check_value(p, &value)?;
                let base = self.carrier.base();
                for (&q, gq) in cache.iter() {
                    if base.leq(p, q) {
                        self.check_pair(p, q, &value, gq)?;
                    }
                    if base.leq(q, p) {
                        self.check_pair(q, p, gq, &value)?;
                    }
                }
                cache.insert(p, value.clone());
                Ok(value)
            }
        }
    }

    pub fn identity(&self) -> LimitElement {
        let n = self.carrier.base().len();
        LimitElement { repr: Repr::Eager(Arc::new(vec![GroupElem::identity(self.variant); n])) }
    }

    /// The basis element `(x_{a_p})_p` of a thread.
    pub fn basis_element(&self, t: &Thread) -> Result<LimitElement, LimitError> {
        if !self.carrier.is_thread(t) {
            return Err(SystemError::NotAThread("choice is not coherent".into()).into());
        }
        let values = t.0.iter().map(|&a| GroupElem::generator(self.variant, a)).collect();
        Ok(LimitElement { repr: Repr::Eager(Arc::new(values)) })
    }

    fn pointwise(
        &self,
        parts: &[&LimitElement],
        op: impl Fn(&[GroupElem]) -> Result<GroupElem, LimitError> + Send + Sync + 'static,
    ) -> Result<LimitElement, LimitError> {
        if let Some(vals) = parts.iter().map(|g| g.values()).collect::<Option<Vec<_>>>() {
            let values = (0..self.carrier.base().len())
                .map(|p| op(&vals.iter().map(|v| v[p].clone()).collect::<Vec<_>>()))
                .collect::<Result<Vec<_>, _>>()?;
            return self.eager(values);
        }
        let raws: Vec<Evaluator> = parts.iter().map(|g| g.raw()).collect();
        Ok(self.lazy(Arc::new(move |p| {
            let args = raws.iter().map(|r| r(p)).collect::<Result<Vec<_>, _>>()?;
            op(&args)
        })))
    }

    pub fn multiply(&self, a: &LimitElement, b: &LimitElement) -> Result<LimitElement, LimitError> {
        self.pointwise(&[a, b], |x| x[0].multiply(&x[1]))
    }

    pub fn invert(&self, g: &LimitElement) -> Result<LimitElement, LimitError> {
        self.pointwise(&[g], |x| Ok(x[0].invert()))
    }

    pub fn pow(&self, g: &LimitElement, k: Exponent) -> Result<LimitElement, LimitError> {
        self.pointwise(&[g], move |x| x[0].pow(k))
    }

    /// Whether two eager elements agree everywhere, or two lazy ones on
    /// every loaded point.
    pub fn equal(&self, a: &LimitElement, b: &LimitElement) -> Result<bool, LimitError> {
        for p in self.carrier.base().points() {
            if self.evaluate(a, p)? != self.evaluate(b, p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Reads a group element literal over `p`: `a^2.b^-1` for free systems,
    /// `{a:2,b:-1}` (or a word, abelianized) for abelian ones.
    pub fn parse_elem(&self, p: Point, s: &str) -> Result<GroupElem, LimitError> {
        let fiber = self.carrier.fiber(p);
        let lookup = |g: &String| {
            fiber.lookup(g).ok_or_else(|| SystemError::UnknownFiberElement {
                point: self.point_name(p),
                elem: g.clone(),
            })
        };
        let raw: Vec<(String, Exponent)> = if s.trim_start().starts_with('{') {
            if self.variant == Variant::Free {
                return Err(LimitError::VariantMismatch { expected: Variant::Free });
            }
            s.parse::<AbelianVector<String>>()?.entries().iter().map(|(g, k)| (g.clone(), *k)).collect()
        } else {
            crate::words::parse_raw_word(s)?
        };
        let raw = raw.iter().map(|(g, k)| Ok((lookup(g)?, *k))).collect::<Result<Vec<_>, LimitError>>()?;
        Ok(match self.variant {
            Variant::Free => GroupElem::Free(Word::reduce(raw)?),
            Variant::Abelian => GroupElem::Abelian(AbelianVector::from_terms(raw)?),
        })
    }

    /// Literal for `g` in `G_p` using fiber element names. Abelian terms are
    /// listed in name order.
    pub fn format_elem(&self, p: Point, g: &GroupElem) -> String {
        let fiber = self.carrier.fiber(p);
        match g {
            GroupElem::Free(w) => {
                let named = Word::reduce(w.syllables().iter().map(|&(a, k)| (fiber.name(a).into_owned(), k)));
                named.map(|w| w.to_string()).unwrap_or_default()
            }
            GroupElem::Abelian(v) => {
                let named = AbelianVector::from_terms(v.entries().iter().map(|(&a, &k)| (fiber.name(a).into_owned(), k)));
                named.map(|v| v.to_string()).unwrap_or_default()
            }
        }
    }

    /// An eager element from literals keyed by point id.
    pub fn eager_from_literals(
        &self,
        literals: &std::collections::HashMap<String, String>,
    ) -> Result<LimitElement, LimitError> {
        let base = self.carrier.base();
        for id in literals.keys() {
            base.lookup(id)?;
        }
        let values = base
            .names()
            .iter()
            .enumerate()
            .map(|(p, id)| {
                let lit = literals.get(id).ok_or_else(|| LimitError::MissingValue(id.clone()))?;
                self.parse_elem(p, lit)
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.eager(values)
    }

    /// A random element: a random value over the maximum, pushed down.
    /// Every limit element over a finite base arises this way.
    pub fn random_element<R: Rng>(&self, rng: &mut R, terms: usize, max_exp: Exponent) -> Result<LimitElement, LimitError> {
        let base = self.carrier.base();
        let top = base.maximum().ok_or(PosetError::SymbolicUnsupported)?;
        let raw: Vec<(FiberIdx, Exponent)> = (0..terms)
            .map(|_| {
                let k = rng.random_range(1..=max_exp) * if rng.random_bool(0.5) { 1 } else { -1 };
                (rng.random_range(0..self.rank(top)), k)
            })
            .collect();
        let at_top = match self.variant {
            Variant::Free => GroupElem::Free(Word::reduce(raw)?),
            Variant::Abelian => GroupElem::Abelian(AbelianVector::from_terms(raw)?),
        };
        let values = base.points().map(|p| self.connect(p, top, &at_top)).collect::<Result<Vec<_>, _>>()?;
        self.eager(values)
    }
}

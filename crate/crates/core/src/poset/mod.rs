//! Directed sets: explicit finite preorders, built-in families and symbolic
//! order oracles, plus the ascent game played on them (see [`game`]).
//!
//! Elements are addressed by their index in the canonical load order. For a
//! finite set that is every element; for a symbolic set it is the probe chain,
//! the finite part of the (conceptually infinite) order that has been loaded.

pub mod game;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use game::{
    judge_transcript, play_bounded, player_one_bound_strategy, FnStrategy, GameTranscript,
    ScriptedStrategy, SeededRandomStrategy, Side, Strategy, Verdict,
};

/// Index of an element in the canonical load order of a [`DirectedSet`].
pub type Point = usize;

/// Order oracle over element ids of a symbolic directed set.
pub type LeqOracle = Arc<dyn Fn(&str, &str) -> bool + Send + Sync>;

/// Partial upper-bound oracle over element ids of a symbolic directed set.
pub type BoundOracle = Arc<dyn Fn(&[&str]) -> Option<String> + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("not directed: `{0}` and `{1}` have no common upper bound")]
    NotDirected(String, String),
    #[error("no upper bound among loaded elements for {{{}}}", .0.join(", "))]
    NoBound(Vec<String>),
    #[error("operation needs a finite directed set or a bound oracle")]
    SymbolicUnsupported,
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("empty element id")]
    EmptyId,
    #[error("directed set has no elements")]
    Empty,
    #[error("probe chain is not increasing at `{0}` -> `{1}`")]
    ProbeNotChain(String, String),
    #[error("built-in `{name}` does not accept parameter {param}")]
    BadParameter { name: String, param: usize },
    #[error("unknown built-in family `{0}`")]
    UnknownBuiltin(String),
    #[error("malformed transcript: {0}")]
    MalformedTranscript(String),
    #[error("rounds must be at least 1")]
    NoRounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Finite,
    Symbolic,
}

#[derive(Clone)]
enum Order {
    /// Row-major bit matrix of the reflexive-transitive closure.
    Relation { words: usize, rows: Vec<u64> },
    /// Subsets of a small ground set, encoded as bit masks.
    Subsets(Vec<u32>),
    /// Total order by rank.
    Chain(Vec<usize>),
    Symbolic(LeqOracle),
}

/// A directed preorder. Antisymmetry is not required and elements are never
/// quotiented, so `p <= q <= p` with `p != q` is allowed.
#[derive(Clone)]
pub struct DirectedSet {
    names: Vec<String>,
    index: HashMap<String, Point>,
    order: Order,
    kind: Kind,
    bound_oracle: Option<BoundOracle>,
}

impl fmt::Debug for DirectedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirectedSet")
            .field("kind", &self.kind)
            .field("elements", &self.names)
            .finish()
    }
}

fn index_names(names: &[String]) -> Result<HashMap<String, Point>, PosetError> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() {
            return Err(PosetError::EmptyId);
        }
        if index.insert(n.clone(), i).is_some() {
            return Err(PosetError::DuplicateElement(n.clone()));
        }
    }
    Ok(index)
}

impl DirectedSet {
    /// Loads a finite preorder from its elements (in canonical order) and a
    /// list of generating pairs `p <= q`. The order is the reflexive-transitive
    /// closure of the pairs; the result is rejected unless it is directed.
    pub fn from_pairs<S: AsRef<str>>(elements: &[S], pairs: &[(S, S)]) -> Result<Self, PosetError> {
        let set = Self::from_pairs_unchecked(elements, pairs)?;
        if let Some((p, q)) = set.unbounded_pair() {
            return Err(PosetError::NotDirected(set.names[p].clone(), set.names[q].clone()));
        }
        Ok(set)
    }

    /// Like [`DirectedSet::from_pairs`] without the directedness check, for
    /// inspecting preorders that may fail it.
    pub fn from_pairs_unchecked<S: AsRef<str>>(elements: &[S], pairs: &[(S, S)]) -> Result<Self, PosetError> {
        let names: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        if names.is_empty() {
            return Err(PosetError::Empty);
        }
        let index = index_names(&names)?;
        let n = names.len();
        let words = n.div_ceil(64);
        let mut rows = vec![0u64; n * words];
        for i in 0..n {
            rows[i * words + i / 64] |= 1 << (i % 64);
        }
        for (p, q) in pairs {
            let (p, q) = (p.as_ref(), q.as_ref());
            let i = *index.get(p).ok_or_else(|| PosetError::UnknownElement(p.to_string()))?;
            let j = *index.get(q).ok_or_else(|| PosetError::UnknownElement(q.to_string()))?;
            rows[i * words + j / 64] |= 1 << (j % 64);
        }
        // Warshall: row_i |= row_k whenever i <= k.
        for k in 0..n {
            let row_k: Vec<u64> = rows[k * words..(k + 1) * words].to_vec();
            for i in 0..n {
                if rows[i * words + k / 64] >> (k % 64) & 1 == 1 {
                    for (dst, src) in rows[i * words..(i + 1) * words].iter_mut().zip(&row_k) {
                        *dst |= *src;
                    }
                }
            }
        }
        Ok(DirectedSet {
            names,
            index,
            order: Order::Relation { words, rows },
            kind: Kind::Finite,
            bound_oracle: None,
        })
    }

    /// The subsets of `{0..n-1}` ordered by inclusion, `1 <= n <= 16`.
    ///
    /// Element ids look like `{0,2}`; members are zero padded to two digits
    /// once `n > 10`. Canonical order is lexicographic on the ids, which puts
    /// the full set first.
    pub fn powerset(n: usize) -> Result<Self, PosetError> {
        if n == 0 || n > 16 {
            return Err(PosetError::BadParameter { name: "powerset".into(), param: n });
        }
        let width = if n > 10 { 2 } else { 1 };
        let mut entries: Vec<(String, u32)> = (0u32..1 << n)
            .map(|mask| (subset_name(mask, width), mask))
            .collect();
        entries.sort();
        let (names, masks): (Vec<String>, Vec<u32>) = entries.into_iter().unzip();
        let index = index_names(&names)?;
        Ok(DirectedSet { names, index, order: Order::Subsets(masks), kind: Kind::Finite, bound_oracle: None })
    }

    /// The chain `0 < 1 < ... < n-1`, ids zero padded so that lexicographic
    /// and numeric order agree.
    pub fn chain(n: usize) -> Result<Self, PosetError> {
        if n == 0 {
            return Err(PosetError::BadParameter { name: "chain".into(), param: n });
        }
        let width = (n - 1).to_string().len();
        let names: Vec<String> = (0..n).map(|i| format!("{i:0width$}")).collect();
        let index = index_names(&names)?;
        Ok(DirectedSet { names, index, order: Order::Chain((0..n).collect()), kind: Kind::Finite, bound_oracle: None })
    }

    /// A symbolic directed set given by an order oracle, a loaded probe chain
    /// and an optional bound oracle. Only the probe chain is addressable.
    pub fn symbolic(
        probe_chain: Vec<String>,
        leq: LeqOracle,
        bound_oracle: Option<BoundOracle>,
    ) -> Result<Self, PosetError> {
        if probe_chain.is_empty() {
            return Err(PosetError::Empty);
        }
        let index = index_names(&probe_chain)?;
        for w in probe_chain.windows(2) {
            if !leq(&w[0], &w[1]) {
                return Err(PosetError::ProbeNotChain(w[0].clone(), w[1].clone()));
            }
        }
        Ok(DirectedSet { names: probe_chain, index, order: Order::Symbolic(leq), kind: Kind::Symbolic, bound_oracle })
    }

    /// The natural numbers under `<=`, with `0..probe_len` loaded as the
    /// probe chain and `max` as bound oracle.
    pub fn omega(probe_len: usize) -> Result<Self, PosetError> {
        fn num(s: &str) -> Option<u64> {
            s.parse().ok()
        }
        let leq: LeqOracle = Arc::new(|a, b| matches!((num(a), num(b)), (Some(x), Some(y)) if x <= y));
        let bound: BoundOracle = Arc::new(|ids| {
            ids.iter().map(|s| num(s)).collect::<Option<Vec<_>>>()?.into_iter().max().map(|m| m.to_string())
        });
        Self::symbolic((0..probe_len).map(|i| i.to_string()).collect(), leq, Some(bound))
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_finite(&self) -> bool {
        self.kind == Kind::Finite
    }

    /// Number of loaded elements.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, p: Point) -> &str {
        &self.names[p]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn points(&self) -> std::ops::Range<Point> {
        0..self.names.len()
    }

    pub fn lookup(&self, id: &str) -> Result<Point, PosetError> {
        self.index.get(id).copied().ok_or_else(|| PosetError::UnknownElement(id.to_string()))
    }

    pub fn has_bound_oracle(&self) -> bool {
        self.bound_oracle.is_some()
    }

    #[inline]
    pub fn leq(&self, p: Point, q: Point) -> bool {
        match &self.order {
            Order::Relation { words, rows } => rows[p * words + q / 64] >> (q % 64) & 1 == 1,
            Order::Subsets(masks) => masks[p] & !masks[q] == 0,
            Order::Chain(rank) => rank[p] <= rank[q],
            Order::Symbolic(leq) => leq(&self.names[p], &self.names[q]),
        }
    }

    fn unbounded_pair(&self) -> Option<(Point, Point)> {
        // A finite preorder is directed iff it has an element above everything;
        // fall back to the pairwise search only to name a witness pair.
        if self.maximum().is_some() {
            return None;
        }
        for p in self.points() {
            for q in p + 1..self.len() {
                if !self.points().any(|r| self.leq(p, r) && self.leq(q, r)) {
                    return Some((p, q));
                }
            }
        }
        None
    }

    /// Whether every pair of loaded elements has an upper bound.
    ///
    /// Symbolic sets are checked pairwise through the bound oracle.
    pub fn is_directed(&self) -> Result<bool, PosetError> {
        match self.kind {
            Kind::Finite => Ok(self.maximum().is_some()),
            Kind::Symbolic => {
                if self.bound_oracle.is_none() {
                    return Err(PosetError::SymbolicUnsupported);
                }
                for p in self.points() {
                    for q in p..self.len() {
                        if self.upper_bound(&[p, q]).is_err() {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
        }
    }

    /// First element in canonical load order that is above every member of
    /// `set`. Symbolic sets consult the bound oracle first.
    pub fn upper_bound(&self, set: &[Point]) -> Result<Point, PosetError> {
        if let Some(oracle) = &self.bound_oracle {
            let ids: Vec<&str> = set.iter().map(|&p| self.names[p].as_str()).collect();
            if let Some(b) = oracle(&ids).and_then(|b| self.index.get(&b).copied()) {
                if set.iter().all(|&p| self.leq(p, b)) {
                    return Ok(b);
                }
            }
        }
        self.points()
            .find(|&r| set.iter().all(|&p| self.leq(p, r)))
            .ok_or_else(|| PosetError::NoBound(set.iter().map(|&p| self.names[p].clone()).collect()))
    }

    /// First element above all others. Always present for finite directed
    /// sets; `None` for symbolic sets.
    pub fn maximum(&self) -> Option<Point> {
        if self.kind == Kind::Symbolic {
            return None;
        }
        // Candidate sweep: keep an element that bounds everything seen so far.
        // In a directed preorder the final candidate is a maximum, but the
        // first maximum in load order is what callers rely on.
        let n = self.len();
        let mut cand = 0;
        for q in 1..n {
            if !self.leq(q, cand) {
                cand = q;
            }
        }
        if !self.points().all(|q| self.leq(q, cand)) {
            return None;
        }
        self.points().find(|&m| self.leq(cand, m))
    }

    /// Pairs `(p, q)` with `p <= q`, in lexicographic index order.
    pub fn comparable_pairs(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.points().flat_map(move |p| self.points().filter(move |&q| self.leq(p, q)).map(move |q| (p, q)))
    }
}

fn subset_name(mask: u32, width: usize) -> String {
    let members: Vec<String> = (0..32).filter(|i| mask >> i & 1 == 1).map(|i| format!("{i:0width$}")).collect();
    format!("{{{}}}", members.join(","))
}

/// Bit mask of a powerset element id such as `{0,2}`.
pub fn parse_subset_name(id: &str) -> Option<u32> {
    let inner = id.strip_prefix('{')?.strip_suffix('}')?;
    if inner.is_empty() {
        return Some(0);
    }
    inner.split(',').try_fold(0u32, |m, s| {
        let i: u32 = s.parse().ok()?;
        (i < 32).then_some(m | 1 << i)
    })
}

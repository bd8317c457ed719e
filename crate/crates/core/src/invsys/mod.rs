//! Inverse systems of finite sets over directed sets and their threads.
//!
//! A system assigns a nonempty fiber `A_p` to every loaded point and a map
//! `f_{p,q}: A_q -> A_p` to every comparable pair `p <= q`, subject to
//! `f_{p,p} = id` and `f_{p,q} . f_{q,r} = f_{p,r}`. Threads are the coherent
//! choices `(a_p)`, i.e. the elements of the inverse limit.

mod good;
mod tree;

use std::borrow::Cow;
use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::poset::{parse_subset_name, DirectedSet, Point, PosetError};

pub use good::{check_good, Clause, GameCondition, GoodnessReport};
pub use tree::Tree;

/// Index of an element inside one fiber.
pub type FiberIdx = usize;

/// Most threads [`InverseSystem::enumerate_threads`] will produce.
pub const MAX_THREADS: usize = 1_000_000;
/// Most thread entries (threads times points) it will materialize.
pub const MAX_THREAD_CELLS: usize = 1 << 25;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("fiber over `{0}` is empty")]
    EmptyFiber(String),
    #[error("no fiber given for `{0}`")]
    MissingFiber(String),
    #[error("duplicate element `{elem}` in fiber over `{point}`")]
    DuplicateFiberElement { point: String, elem: String },
    #[error("map {p}<{q} is not defined on `{missing}`")]
    NonTotalMap { p: String, q: String, missing: String },
    #[error("`{elem}` is not in the fiber over `{point}`")]
    UnknownFiberElement { point: String, elem: String },
    #[error("map given for {p}<{q}, but {p} is not below {q}")]
    NotComparable { p: String, q: String },
    #[error("no chain of given maps composes to {p}<{q}")]
    MissingMap { p: String, q: String },
    #[error("coherence fails for {p} <= {q} <= {r} at `{elem}`")]
    CoherenceViolation { p: String, q: String, r: String, elem: String },
    #[error("{what} exceeds the size limit ({limit})")]
    SizeLimit { what: String, limit: usize },
    #[error("tree level {0} is empty")]
    EmptyLevel(usize),
    #[error("branch is not cofinal: {0}")]
    NotCofinal(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("not a thread: {0}")]
    NotAThread(String),
}

/// The elements of one fiber.
#[derive(Debug, Clone)]
pub enum Fiber {
    Listed { names: Vec<String>, index: HashMap<String, FiberIdx> },
    /// All functions from `members` to `{0,1}`; element `i` sends the `j`-th
    /// member to bit `j` of `i`. Named `b` followed by the bits in member order.
    BitFunctions { members: Vec<u32> },
}

impl Fiber {
    pub fn listed(names: Vec<String>) -> Result<Self, String> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(n.clone());
            }
        }
        Ok(Fiber::Listed { names, index })
    }

    pub fn len(&self) -> usize {
        match self {
            Fiber::Listed { names, .. } => names.len(),
            Fiber::BitFunctions { members } => 1 << members.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn name(&self, a: FiberIdx) -> Cow<'_, str> {
        match self {
            Fiber::Listed { names, .. } => Cow::Borrowed(&names[a]),
            Fiber::BitFunctions { members } => {
                let bits: String = (0..members.len()).map(|j| if a >> j & 1 == 1 { '1' } else { '0' }).collect();
                Cow::Owned(format!("b{bits}"))
            }
        }
    }

    pub fn lookup(&self, name: &str) -> Option<FiberIdx> {
        match self {
            Fiber::Listed { index, .. } => index.get(name).copied(),
            Fiber::BitFunctions { members } => {
                let bits = name.strip_prefix('b')?;
                if bits.len() != members.len() {
                    return None;
                }
                bits.chars().enumerate().try_fold(0, |acc, (j, c)| match c {
                    '0' => Some(acc),
                    '1' => Some(acc | 1 << j),
                    _ => None,
                })
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Maps {
    /// `f_{p,q}` as an index table over `A_q`, for every comparable pair.
    Table(HashMap<(Point, Point), Vec<FiberIdx>>),
    /// Restriction of bit functions; computed on demand.
    Restriction,
}

/// A coherent choice of one fiber element per loaded point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Thread(pub Vec<FiberIdx>);

impl Thread {
    pub fn at(&self, p: Point) -> FiberIdx {
        self.0[p]
    }
}

#[derive(Debug, Clone)]
pub struct InverseSystem {
    base: DirectedSet,
    fibers: Vec<Fiber>,
    maps: Maps,
}

/// A map for a generating pair `p < q`, as fiber indices over `A_q`.
#[derive(Debug, Clone)]
pub struct Edge {
    pub lower: Point,
    pub upper: Point,
    pub map: Vec<FiberIdx>,
}

impl InverseSystem {
    /// Builds a system from fibers (one per loaded point, in load order) and
    /// maps for a generating set of comparable pairs. Maps for all other
    /// comparable pairs are composed along chains of given maps, then the
    /// identity and composition laws are checked on every comparable triple.
    pub fn from_edges(base: DirectedSet, fibers: Vec<Fiber>, edges: Vec<Edge>) -> Result<Self, SystemError> {
        let n = base.len();
        if fibers.len() != n {
            return Err(SystemError::MissingFiber(base.name(fibers.len().min(n.saturating_sub(1))).to_string()));
        }
        for (p, fib) in fibers.iter().enumerate() {
            if fib.is_empty() {
                return Err(SystemError::EmptyFiber(base.name(p).to_string()));
            }
        }
        let mut below: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            let (pn, qn) = (base.name(e.lower).to_string(), base.name(e.upper).to_string());
            if !base.leq(e.lower, e.upper) {
                return Err(SystemError::NotComparable { p: pn, q: qn });
            }
            if e.map.len() != fibers[e.upper].len() {
                let missing = fibers[e.upper].name(e.map.len().min(fibers[e.upper].len() - 1)).into_owned();
                return Err(SystemError::NonTotalMap { p: pn, q: qn, missing });
            }
            if let Some(&bad) = e.map.iter().find(|&&a| a >= fibers[e.lower].len()) {
                return Err(SystemError::UnknownFiberElement { point: pn, elem: bad.to_string() });
            }
            below[e.upper].push(i);
        }

        let mut table: HashMap<(Point, Point), Vec<FiberIdx>> = HashMap::new();
        for q in 0..n {
            table.insert((q, q), (0..fibers[q].len()).collect());
            let mut queue = VecDeque::from([q]);
            while let Some(y) = queue.pop_front() {
                for &ei in &below[y] {
                    let e = &edges[ei];
                    if table.contains_key(&(e.lower, q)) {
                        continue;
                    }
                    let composed = table[&(y, q)].iter().map(|&a| e.map[a]).collect();
                    table.insert((e.lower, q), composed);
                    queue.push_back(e.lower);
                }
            }
        }
        for (p, q) in base.comparable_pairs() {
            if !table.contains_key(&(p, q)) {
                return Err(SystemError::MissingMap { p: base.name(p).to_string(), q: base.name(q).to_string() });
            }
        }
        let sys = InverseSystem { base, fibers, maps: Maps::Table(table) };
        // Direct maps win the composition, so a mismatch here is a non-identity
        // self map or a pair given twice.
        for e in &edges {
            if let Some(a) = (0..e.map.len()).find(|&a| sys.map(e.lower, e.upper, a) != e.map[a]) {
                return Err(sys.violation(e.lower, e.lower, e.upper, a));
            }
        }
        sys.check_coherence()?;
        Ok(sys)
    }

    /// Name-level variant of [`InverseSystem::from_edges`]: fibers keyed by
    /// point id, maps keyed by `(p, q)` ids sending names in `A_q` to names
    /// in `A_p`.
    pub fn from_named(
        base: DirectedSet,
        fibers: &HashMap<String, Vec<String>>,
        maps: &[(String, String, HashMap<String, String>)],
    ) -> Result<Self, SystemError> {
        for id in fibers.keys() {
            base.lookup(id)?;
        }
        let fibs = base
            .names()
            .iter()
            .map(|id| {
                let names = fibers.get(id).ok_or_else(|| SystemError::MissingFiber(id.clone()))?;
                Fiber::listed(names.clone())
                    .map_err(|elem| SystemError::DuplicateFiberElement { point: id.clone(), elem })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut edges = Vec::with_capacity(maps.len());
        for (pid, qid, m) in maps {
            let (p, q) = (base.lookup(pid)?, base.lookup(qid)?);
            for src in m.keys() {
                if fibs[q].lookup(src).is_none() {
                    return Err(SystemError::UnknownFiberElement { point: qid.clone(), elem: src.clone() });
                }
            }
            let map = (0..fibs[q].len())
                .map(|a| {
                    let src = fibs[q].name(a);
                    let dst = m.get(src.as_ref()).ok_or_else(|| SystemError::NonTotalMap {
                        p: pid.clone(),
                        q: qid.clone(),
                        missing: src.to_string(),
                    })?;
                    fibs[p]
                        .lookup(dst)
                        .ok_or_else(|| SystemError::UnknownFiberElement { point: pid.clone(), elem: dst.clone() })
                })
                .collect::<Result<Vec<_>, _>>()?;
            edges.push(Edge { lower: p, upper: q, map });
        }
        Self::from_edges(base, fibs, edges)
    }

    /// The restriction system over the subsets of `{0..n-1}`: the fiber over
    /// `u` is every function `u -> {0,1}` and the maps restrict. Its threads
    /// correspond to the `2^n` functions on the whole ground set.
    pub fn restriction(n: usize) -> Result<Self, SystemError> {
        if n == 0 || n > 16 {
            return Err(SystemError::SizeLimit { what: format!("restriction system of rank {n}"), limit: 16 });
        }
        let base = DirectedSet::powerset(n)?;
        let fibers = base
            .names()
            .iter()
            .map(|id| {
                let mask = parse_subset_name(id).expect("powerset ids parse");
                Fiber::BitFunctions { members: (0..n as u32).filter(|i| mask >> i & 1 == 1).collect() }
            })
            .collect();
        Ok(InverseSystem { base, fibers, maps: Maps::Restriction })
    }

    pub fn base(&self) -> &DirectedSet {
        &self.base
    }

    pub fn fiber(&self, p: Point) -> &Fiber {
        &self.fibers[p]
    }

    pub fn fibers(&self) -> &[Fiber] {
        &self.fibers
    }

    /// `f_{p,q}(a)` for `p <= q` and `a` in `A_q`.
    pub fn map(&self, p: Point, q: Point, a: FiberIdx) -> FiberIdx {
        debug_assert!(self.base.leq(p, q), "map requested for incomparable pair");
        match &self.maps {
            Maps::Table(t) => t[&(p, q)][a],
            Maps::Restriction => {
                let (Fiber::BitFunctions { members: lo }, Fiber::BitFunctions { members: hi }) =
                    (&self.fibers[p], &self.fibers[q])
                else {
                    unreachable!("restriction systems only hold bit-function fibers")
                };
                let mut out = 0;
                for (j, m) in lo.iter().enumerate() {
                    let k = hi.iter().position(|x| x == m).expect("lower set is a subset");
                    out |= (a >> k & 1) << j;
                }
                out
            }
        }
    }

    fn violation(&self, p: Point, q: Point, r: Point, a: FiberIdx) -> SystemError {
        SystemError::CoherenceViolation {
            p: self.base.name(p).to_string(),
            q: self.base.name(q).to_string(),
            r: self.base.name(r).to_string(),
            elem: self.fibers[r].name(a).into_owned(),
        }
    }

    /// Exhaustively checks `f_{p,p} = id` and `f_{p,q} . f_{q,r} = f_{p,r}`.
    pub fn check_coherence(&self) -> Result<(), SystemError> {
        let pts = self.base.points();
        for r in pts.clone() {
            for a in 0..self.fibers[r].len() {
                if self.map(r, r, a) != a {
                    return Err(self.violation(r, r, r, a));
                }
            }
            for q in pts.clone().filter(|&q| self.base.leq(q, r)) {
                for p in pts.clone().filter(|&p| self.base.leq(p, q)) {
                    for a in 0..self.fibers[r].len() {
                        if self.map(p, q, self.map(q, r, a)) != self.map(p, r, a) {
                            return Err(self.violation(p, q, r, a));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether `t` is a coherent choice over all loaded points.
    pub fn is_thread(&self, t: &Thread) -> bool {
        t.0.len() == self.base.len()
            && t.0.iter().enumerate().all(|(p, &a)| a < self.fibers[p].len())
            && self.base.comparable_pairs().all(|(p, q)| self.map(p, q, t.0[q]) == t.0[p])
    }

    /// The thread through `a` in the fiber over `top`, where `top` is a
    /// maximum of the base.
    pub fn push_down(&self, top: Point, a: FiberIdx) -> Thread {
        Thread(self.base.points().map(|p| self.map(p, top, a)).collect())
    }

    /// All threads, in lexicographic order of their fiber indices.
    ///
    /// A finite directed base has a maximum `m`, so every thread is the image
    /// of its value at `m` and the threads are in bijection with `A_m`.
    pub fn enumerate_threads(&self) -> Result<Vec<Thread>, SystemError> {
        let top = self.base.maximum().ok_or(PosetError::SymbolicUnsupported)?;
        let count = self.fibers[top].len();
        if count > MAX_THREADS {
            return Err(SystemError::SizeLimit { what: format!("{count} threads"), limit: MAX_THREADS });
        }
        if count.saturating_mul(self.base.len()) > MAX_THREAD_CELLS {
            return Err(SystemError::SizeLimit {
                what: format!("{count} threads over {} points", self.base.len()),
                limit: MAX_THREAD_CELLS,
            });
        }
        let mut threads: Vec<Thread> = (0..count).map(|a| self.push_down(top, a)).collect();
        threads.sort();
        Ok(threads)
    }

    /// `(point id, fiber element name)` pairs of a thread, in load order.
    pub fn thread_names(&self, t: &Thread) -> Vec<(String, String)> {
        t.0.iter()
            .enumerate()
            .map(|(p, &a)| (self.base.name(p).to_string(), self.fibers[p].name(a).into_owned()))
            .collect()
    }

    /// Reads a thread from a map of point ids to fiber element names.
    pub fn thread_from_names(&self, names: &HashMap<String, String>) -> Result<Thread, SystemError> {
        let t = Thread(
            self.base
                .names()
                .iter()
                .enumerate()
                .map(|(p, id)| {
                    let elem = names.get(id).ok_or_else(|| SystemError::NotAThread(format!("no value at `{id}`")))?;
                    self.fibers[p]
                        .lookup(elem)
                        .ok_or_else(|| SystemError::UnknownFiberElement { point: id.clone(), elem: elem.clone() })
                })
                .collect::<Result<_, _>>()?,
        );
        if !self.is_thread(&t) {
            return Err(SystemError::NotAThread("choice is not coherent".into()));
        }
        Ok(t)
    }

    /// Largest fiber size.
    pub fn max_fiber(&self) -> usize {
        self.fibers.iter().map(Fiber::len).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_pq() -> DirectedSet {
        DirectedSet::from_pairs(&["p", "q"], &[("p", "q")]).unwrap()
    }

    fn named(m: &[(&str, &str)]) -> HashMap<String, String> {
        m.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    fn fibers(m: &[(&str, &[&str])]) -> HashMap<String, Vec<String>> {
        m.iter().map(|(p, f)| (p.to_string(), f.iter().map(|s| s.to_string()).collect())).collect()
    }

    #[test]
    fn single_point() {
        let base = DirectedSet::from_pairs::<&str>(&["p"], &[]).unwrap();
        let sys = InverseSystem::from_named(base, &fibers(&[("p", &["a"])]), &[]).unwrap();
        assert_eq!(sys.enumerate_threads().unwrap(), vec![Thread(vec![0])]);
    }

    #[test]
    fn one_point_two_elements() {
        let base = DirectedSet::from_pairs::<&str>(&["p"], &[]).unwrap();
        let sys = InverseSystem::from_named(base, &fibers(&[("p", &["a", "b"])]), &[]).unwrap();
        assert_eq!(sys.enumerate_threads().unwrap().len(), 2);
    }

    #[test]
    fn missing_value_is_non_total() {
        let f = fibers(&[("p", &["c"]), ("q", &["a", "b"])]);
        let maps = [("p".to_string(), "q".to_string(), named(&[("a", "c")]))];
        let err = InverseSystem::from_named(chain_pq(), &f, &maps).unwrap_err();
        assert_eq!(err, SystemError::NonTotalMap { p: "p".into(), q: "q".into(), missing: "b".into() });
    }

    #[test]
    fn empty_fiber() {
        let f = fibers(&[("p", &[]), ("q", &["a"])]);
        let err = InverseSystem::from_named(chain_pq(), &f, &[]).unwrap_err();
        assert_eq!(err, SystemError::EmptyFiber("p".into()));
    }

    #[test]
    fn missing_map() {
        let f = fibers(&[("p", &["a"]), ("q", &["a"])]);
        let err = InverseSystem::from_named(chain_pq(), &f, &[]).unwrap_err();
        assert_eq!(err, SystemError::MissingMap { p: "p".into(), q: "q".into() });
    }

    #[test]
    fn incomparable_map_rejected() {
        let f = fibers(&[("p", &["a"]), ("q", &["a"])]);
        let maps = [("q".to_string(), "p".to_string(), named(&[("a", "a")]))];
        let err = InverseSystem::from_named(chain_pq(), &f, &maps).unwrap_err();
        assert!(matches!(err, SystemError::NotComparable { .. }));
    }

    #[test]
    fn three_chain_mismatch_names_the_triple() {
        let base = DirectedSet::from_pairs(&["p", "q", "r"], &[("p", "q"), ("q", "r")]).unwrap();
        let f = fibers(&[("p", &["x", "y"]), ("q", &["x", "y"]), ("r", &["x", "y"])]);
        let id = named(&[("x", "x"), ("y", "y")]);
        let swap = named(&[("x", "y"), ("y", "x")]);
        let maps = [
            ("p".to_string(), "q".to_string(), id.clone()),
            ("q".to_string(), "r".to_string(), id),
            ("p".to_string(), "r".to_string(), swap),
        ];
        let err = InverseSystem::from_named(base, &f, &maps).unwrap_err();
        assert_eq!(
            err,
            SystemError::CoherenceViolation { p: "p".into(), q: "q".into(), r: "r".into(), elem: "x".into() }
        );
    }

    #[test]
    fn non_identity_self_map() {
        let base = DirectedSet::from_pairs::<&str>(&["p"], &[]).unwrap();
        let f = fibers(&[("p", &["x", "y"])]);
        let maps = [("p".to_string(), "p".to_string(), named(&[("x", "y"), ("y", "x")]))];
        assert!(matches!(
            InverseSystem::from_named(base, &f, &maps),
            Err(SystemError::CoherenceViolation { .. })
        ));
    }

    #[test]
    fn restriction_small() {
        let r1 = InverseSystem::restriction(1).unwrap();
        assert_eq!(r1.base().len(), 2);
        assert_eq!(r1.fiber(r1.base().lookup("{}").unwrap()).len(), 1);
        assert_eq!(r1.fiber(r1.base().lookup("{0}").unwrap()).len(), 2);
        let r2 = InverseSystem::restriction(2).unwrap();
        r2.check_coherence().unwrap();
        assert_eq!(r2.enumerate_threads().unwrap().len(), 4);
        assert_eq!(InverseSystem::restriction(3).unwrap().enumerate_threads().unwrap().len(), 8);
        assert!(matches!(InverseSystem::restriction(17), Err(SystemError::SizeLimit { .. })));
    }

    #[test]
    fn restriction_names() {
        let r = InverseSystem::restriction(3).unwrap();
        let u = r.base().lookup("{0,2}").unwrap();
        assert_eq!(r.fiber(u).name(0b01), "b10");
        assert_eq!(r.fiber(u).lookup("b10"), Some(0b01));
        assert_eq!(r.fiber(u).lookup("b1"), None);
        let top = r.base().lookup("{0,1,2}").unwrap();
        // s = (0 -> 1, 1 -> 0, 2 -> 1) restricted to {0,2}
        assert_eq!(r.map(u, top, 0b101), 0b11);
    }

    #[test]
    fn threads_by_name() {
        let r = InverseSystem::restriction(1).unwrap();
        let t = r.thread_from_names(&named(&[("{0}", "b1"), ("{}", "b")])).unwrap();
        assert_eq!(r.thread_names(&t), vec![("{0}".into(), "b1".into()), ("{}".into(), "b".into())]);
        assert!(r.thread_from_names(&named(&[("{0}", "b1")])).is_err());
    }

    #[test]
    fn thread_count_matches_top_fiber() {
        // a vee with a top whose two elements push to the same thread on the
        // left leg but differ on the right one
        let base = DirectedSet::from_pairs(&["l", "r", "t"], &[("l", "t"), ("r", "t")]).unwrap();
        let f = fibers(&[("l", &["a"]), ("r", &["x", "y"]), ("t", &["0", "1"])]);
        let maps = [
            ("l".to_string(), "t".to_string(), named(&[("0", "a"), ("1", "a")])),
            ("r".to_string(), "t".to_string(), named(&[("0", "x"), ("1", "y")])),
        ];
        let sys = InverseSystem::from_named(base, &f, &maps).unwrap();
        let threads = sys.enumerate_threads().unwrap();
        assert_eq!(threads.len(), 2);
        assert!(threads.iter().all(|t| sys.is_thread(t)));
    }
}

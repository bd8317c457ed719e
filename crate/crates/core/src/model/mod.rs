//! Finite inverse systems of finite groups and the relational structure whose
//! automorphism group is their inverse limit.

mod phi;
mod search;
mod structure;

use std::collections::HashMap;

use thiserror::Error;

use crate::invsys::{Edge, Fiber, InverseSystem, SystemError};
use crate::poset::{DirectedSet, Point, PosetError};

pub use phi::{verify_phi_isomorphism, Automorphism, PhiReport};
pub use structure::{Relation, Structure, Triple, MAX_DOMAIN};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("table over `{point}` is not a group: {reason}")]
    NotAGroup { point: String, reason: String },
    #[error("map {p}<{q} is not a homomorphism: {reason}")]
    NotAHomomorphism { p: String, q: String, reason: String },
    #[error("structure has {size} elements, more than {limit}")]
    SizeLimit { size: usize, limit: usize },
    #[error("automorphism is not a translation over `{point}` at `{elem}`")]
    TranslationFormViolated { point: String, elem: String },
    #[error("h_{{{p},{q}}}(g_{q}) != g_{p}")]
    Incoherent { p: String, q: String },
    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(String),
    #[error("expected {expected} values, got {got}")]
    WrongArity { expected: usize, got: usize },
}

/// A finite group as a multiplication table over element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyTable {
    names: Vec<String>,
    mul: Vec<Vec<usize>>,
    id: usize,
}

impl CayleyTable {
    /// Checks closure, identity, inverses and associativity. The error is a
    /// bare reason; callers attach the point.
    pub fn new(names: Vec<String>, mul: Vec<Vec<usize>>, id: usize) -> Result<Self, String> {
        let n = names.len();
        if n == 0 {
            return Err("no elements".into());
        }
        let mut seen = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if let Some(j) = seen.insert(name.as_str(), i) {
                return Err(format!("elements {j} and {i} are both named `{name}`"));
            }
        }
        if mul.len() != n || mul.iter().any(|row| row.len() != n) {
            return Err(format!("table is not {n}x{n}"));
        }
        if let Some((a, b)) = pairs(n).find(|&(a, b)| mul[a][b] >= n) {
            return Err(format!("{a}*{b} = {} is out of range", mul[a][b]));
        }
        if id >= n {
            return Err(format!("identity index {id} is out of range"));
        }
        if let Some(a) = (0..n).find(|&a| mul[id][a] != a || mul[a][id] != a) {
            return Err(format!("`{}` is not fixed by the identity", names[a]));
        }
        if let Some(a) = (0..n).find(|&a| !(0..n).any(|b| mul[a][b] == id && mul[b][a] == id)) {
            return Err(format!("`{}` has no inverse", names[a]));
        }
        for (a, b) in pairs(n) {
            let ab = mul[a][b];
            if let Some(c) = (0..n).find(|&c| mul[ab][c] != mul[a][mul[b][c]]) {
                return Err(format!("not associative at ({a},{b},{c})"));
            }
        }
        Ok(CayleyTable { names, mul, id })
    }

    /// `Z/n` with elements named `0..n-1`.
    pub fn cyclic(n: usize) -> Self {
        let names = (0..n).map(|i| i.to_string()).collect();
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        CayleyTable { names, mul, id: 0 }
    }

    /// `self x other`, element `(a, b)` at index `a * |other| + b`.
    pub fn product(&self, other: &Self) -> Self {
        let m = other.order();
        let idx: Vec<(usize, usize)> = (0..self.order()).flat_map(|a| (0..m).map(move |b| (a, b))).collect();
        let names = idx.iter().map(|&(a, b)| format!("({},{})", self.names[a], other.names[b])).collect();
        let mul = idx
            .iter()
            .map(|&(a, b)| idx.iter().map(|&(c, d)| self.mul(a, c) * m + other.mul(b, d)).collect())
            .collect();
        CayleyTable { names, mul, id: self.id * m + other.id }
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        self.id
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.mul[a][b] == self.id).expect("validated table has inverses")
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mul
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)))
}

/// A map `G_q -> G_p` for a generating pair `lower <= upper`.
#[derive(Debug, Clone)]
pub struct Hom {
    pub lower: Point,
    pub upper: Point,
    pub map: Vec<usize>,
}

/// Groups over a finite directed set with coherent homomorphisms. The
/// underlying sets and maps form an ordinary inverse system, whose threads
/// are exactly the elements of the inverse limit.
#[derive(Debug, Clone)]
pub struct FiniteGroupSystem {
    sets: InverseSystem,
    groups: Vec<CayleyTable>,
}

impl FiniteGroupSystem {
    /// `groups` are in load order; homs are given for a generating set of
    /// pairs and composed for the rest.
    pub fn new(base: DirectedSet, groups: Vec<CayleyTable>, homs: Vec<Hom>) -> Result<Self, ModelError> {
        if !base.is_finite() {
            return Err(PosetError::SymbolicUnsupported.into());
        }
        if groups.len() != base.len() {
            return Err(ModelError::WrongArity { expected: base.len(), got: groups.len() });
        }
        for h in &homs {
            let (p, q) = (base.name(h.lower).to_string(), base.name(h.upper).to_string());
            let (gp, gq) = (&groups[h.lower], &groups[h.upper]);
            let err = |reason: String| ModelError::NotAHomomorphism { p: p.clone(), q: q.clone(), reason };
            if h.map.len() != gq.order() {
                return Err(err(format!("defined on {} of {} elements", h.map.len(), gq.order())));
            }
            if let Some(&bad) = h.map.iter().find(|&&x| x >= gp.order()) {
                return Err(err(format!("image index {bad} is out of range")));
            }
            if h.map[gq.identity()] != gp.identity() {
                return Err(err("identity is not preserved".into()));
            }
            if let Some((a, b)) = pairs(gq.order()).find(|&(a, b)| h.map[gq.mul(a, b)] != gp.mul(h.map[a], h.map[b])) {
                return Err(err(format!("h({0}*{1}) != h({0})*h({1})", gq.name(a), gq.name(b))));
            }
        }
        let fibers = groups
            .iter()
            .map(|g| Fiber::listed(g.names().to_vec()).expect("table names are distinct"))
            .collect();
        let edges = homs.into_iter().map(|h| Edge { lower: h.lower, upper: h.upper, map: h.map }).collect();
        let sets = InverseSystem::from_edges(base, fibers, edges)?;
        Ok(FiniteGroupSystem { sets, groups })
    }

    pub fn base(&self) -> &DirectedSet {
        self.sets.base()
    }

    /// The underlying inverse system of sets.
    pub fn sets(&self) -> &InverseSystem {
        &self.sets
    }

    pub fn group(&self, p: Point) -> &CayleyTable {
        &self.groups[p]
    }

    pub fn groups(&self) -> &[CayleyTable] {
        &self.groups
    }

    /// `h_{p,q}(g)`.
    pub fn hom(&self, p: Point, q: Point, g: usize) -> usize {
        self.sets.map(p, q, g)
    }

    /// Every coherent family `(g_p)`, each the push-down of its value at the
    /// maximum.
    pub fn limit_elements(&self) -> Result<Vec<Vec<usize>>, ModelError> {
        Ok(self.sets.enumerate_threads()?.into_iter().map(|t| t.0).collect())
    }

    /// Whether `(g_p)` is coherent; names the first failing pair otherwise.
    pub fn check_family(&self, family: &[usize]) -> Result<(), ModelError> {
        let base = self.base();
        if family.len() != base.len() {
            return Err(ModelError::WrongArity { expected: base.len(), got: family.len() });
        }
        if let Some(p) = (0..family.len()).find(|&p| family[p] >= self.groups[p].order()) {
            return Err(ModelError::WrongArity { expected: self.groups[p].order(), got: family[p] + 1 });
        }
        match base.comparable_pairs().find(|&(p, q)| self.hom(p, q, family[q]) != family[p]) {
            Some((p, q)) => Err(ModelError::Incoherent { p: base.name(p).into(), q: base.name(q).into() }),
            None => Ok(()),
        }
    }
}

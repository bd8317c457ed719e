use std::collections::HashSet;

use super::{FiniteGroupSystem, ModelError};
use crate::poset::Point;

/// Largest domain [`Structure::build`] accepts.
pub const MAX_DOMAIN: usize = 200;

/// The domain element `<g, q, i>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triple {
    pub g: usize,
    pub q: Point,
    pub i: u8,
}

/// Interpretation of one relation symbol.
#[derive(Debug, Clone)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    pub tuples: Vec<Vec<usize>>,
    members: HashSet<Vec<usize>>,
}

impl Relation {
    pub fn new(name: String, arity: usize, tuples: Vec<Vec<usize>>) -> Self {
        let members = tuples.iter().cloned().collect();
        Relation { name, arity, tuples, members }
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        self.members.contains(t)
    }
}

/// A finite relational structure with constants. For a group system the
/// domain is every `<g, q, i>` with `i < 2`, laid out point by point with the
/// `i = 0` copy first.
#[derive(Debug, Clone)]
pub struct Structure {
    pub domain: Vec<Triple>,
    /// Domain indices interpreting the constant symbols.
    pub constants: Vec<usize>,
    pub relations: Vec<Relation>,
    offsets: Vec<usize>,
    orders: Vec<usize>,
    names: Vec<String>,
}

impl Structure {
    /// The structure of a finite group system:
    /// constants `<g,q,1>`; `P_q = {<g,q,0>}`;
    /// `H_{q,r} = {(<g,r,0>, <h_{q,r}(g),q,0>)}` for `q <= r`;
    /// `F_q = {(<g,q,0>, <h,q,1>, <g*h,q,0>)}`.
    pub fn build(sys: &FiniteGroupSystem) -> Result<Self, ModelError> {
        let base = sys.base();
        let orders: Vec<usize> = base.points().map(|q| sys.group(q).order()).collect();
        let size = 2 * orders.iter().sum::<usize>();
        if size > MAX_DOMAIN {
            return Err(ModelError::SizeLimit { size, limit: MAX_DOMAIN });
        }
        let mut offsets = Vec::with_capacity(orders.len());
        let mut domain = Vec::with_capacity(size);
        for q in base.points() {
            offsets.push(domain.len());
            for i in 0..2 {
                domain.extend((0..orders[q]).map(|g| Triple { g, q, i }));
            }
        }
        let at = |g: usize, q: Point, i: usize| offsets[q] + i * orders[q] + g;

        let constants = base.points().flat_map(|q| (0..orders[q]).map(move |g| (g, q))).map(|(g, q)| at(g, q, 1)).collect();
        let mut relations = Vec::new();
        for q in base.points() {
            let tuples = (0..orders[q]).map(|g| vec![at(g, q, 0)]).collect();
            relations.push(Relation::new(format!("P_{}", base.name(q)), 1, tuples));
        }
        for (q, r) in base.comparable_pairs() {
            let tuples = (0..orders[r]).map(|g| vec![at(g, r, 0), at(sys.hom(q, r, g), q, 0)]).collect();
            relations.push(Relation::new(format!("H_{},{}", base.name(q), base.name(r)), 2, tuples));
        }
        for q in base.points() {
            let grp = sys.group(q);
            let tuples = (0..orders[q])
                .flat_map(|g| (0..orders[q]).map(move |h| (g, h)))
                .map(|(g, h)| vec![at(g, q, 0), at(h, q, 1), at(grp.mul(g, h), q, 0)])
                .collect();
            relations.push(Relation::new(format!("F_{}", base.name(q)), 3, tuples));
        }
        Ok(Structure { domain, constants, relations, offsets, orders, names: base.names().to_vec() })
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    /// Domain index of `<g, q, i>`.
    pub fn index(&self, g: usize, q: Point, i: u8) -> usize {
        self.offsets[q] + usize::from(i) * self.orders[q] + g
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }

    pub(crate) fn point_count(&self) -> usize {
        self.orders.len()
    }

    pub(crate) fn point_name(&self, q: Point) -> &str {
        &self.names[q]
    }

    /// Whether `perm` is a bijection fixing every constant and preserving
    /// every relation in both directions.
    pub fn is_automorphism(&self, perm: &[usize]) -> Result<(), String> {
        let n = self.len();
        if perm.len() != n {
            return Err(format!("permutation has {} entries for {} elements", perm.len(), n));
        }
        let mut hit = vec![false; n];
        for &y in perm {
            if y >= n || std::mem::replace(&mut hit[y], true) {
                return Err("not a bijection".into());
            }
        }
        if let Some(&c) = self.constants.iter().find(|&&c| perm[c] != c) {
            return Err(format!("moves constant {c}"));
        }
        let mut inv = vec![0; n];
        for (x, &y) in perm.iter().enumerate() {
            inv[y] = x;
        }
        for rel in &self.relations {
            for t in &rel.tuples {
                let fwd: Vec<usize> = t.iter().map(|&x| perm[x]).collect();
                let back: Vec<usize> = t.iter().map(|&x| inv[x]).collect();
                if !rel.contains(&fwd) || !rel.contains(&back) {
                    return Err(format!("{} is not preserved", rel.name));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn one_point_z2() {
        let m = Structure::build(&one_point(2)).unwrap();
        assert_eq!(m.len(), 4);
        assert_eq!(m.relation("F_p").unwrap().tuples.len(), 4);
        assert_eq!(m.constants.len(), 2);
    }

    #[test]
    fn z4_chain() {
        let m = Structure::build(&z4_to_z2()).unwrap();
        assert_eq!(m.len(), 12);
        assert_eq!(m.relation("H_p,q").unwrap().tuples.len(), 4);
        assert_eq!(m.constants.len(), 6);
        assert_eq!(m.domain[m.index(3, 1, 1)], Triple { g: 3, q: 1, i: 1 });
    }

    #[test]
    fn identity_permutation_is_an_automorphism() {
        let m = Structure::build(&vee_with_top()).unwrap();
        let id: Vec<usize> = (0..m.len()).collect();
        assert!(m.is_automorphism(&id).is_ok());
        let mut swap = id.clone();
        swap.swap(m.index(0, 0, 1), m.index(1, 0, 1));
        assert!(m.is_automorphism(&swap).is_err());
    }

    #[test]
    fn size_limit() {
        assert!(matches!(Structure::build(&one_point(101)), Err(ModelError::SizeLimit { size: 202, .. })));
    }
}

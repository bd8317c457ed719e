//! Backtracking enumeration of automorphisms of a finite relational
//! structure. Nothing here knows how the structure was built: candidates are
//! filtered by an incidence signature and every relation tuple is checked as
//! soon as all of its entries are assigned.

use std::collections::HashMap;

use super::structure::Structure;

impl Structure {
    /// Every permutation fixing the constants and preserving every relation,
    /// in lexicographic order.
    ///
    /// A bijection that maps each relation into itself maps it onto itself,
    /// since relations are finite, so only the forward direction is checked.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        // incidence signature: how often x occurs at each position of each relation
        let width: usize = self.relations.iter().map(|r| r.arity).sum();
        let mut sig = vec![vec![0u32; width + 1]; n];
        // (relation, tuple) pairs each element occurs in
        let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        let mut col = 0;
        for (ri, rel) in self.relations.iter().enumerate() {
            for (ti, t) in rel.tuples.iter().enumerate() {
                for (pos, &x) in t.iter().enumerate() {
                    sig[x][col + pos] += 1;
                    if incident[x].last() != Some(&(ri, ti)) {
                        incident[x].push((ri, ti));
                    }
                }
            }
            col += rel.arity;
        }
        for &c in &self.constants {
            sig[c][width] = 1;
        }
        let mut classes: HashMap<&[u32], Vec<usize>> = HashMap::new();
        for (x, s) in sig.iter().enumerate() {
            classes.entry(s.as_slice()).or_default().push(x);
        }
        let candidates: Vec<Vec<usize>> = (0..n)
            .map(|x| if sig[x][width] == 1 { vec![x] } else { classes[sig[x].as_slice()].clone() })
            .collect();

        // constants first, then unary blocks, then the rest
        let mut order: Vec<usize> = self.constants.clone();
        let mut placed = vec![false; n];
        for &c in &order {
            placed[c] = true;
        }
        for rel in self.relations.iter().filter(|r| r.arity == 1) {
            for t in &rel.tuples {
                if !std::mem::replace(&mut placed[t[0]], true) {
                    order.push(t[0]);
                }
            }
        }
        order.extend((0..n).filter(|&x| !placed[x]));

        let mut search = Search {
            m: self,
            order,
            candidates,
            incident,
            image: vec![None; n],
            used: vec![false; n],
            found: Vec::new(),
        };
        search.extend(0);
        let mut found = search.found;
        found.sort();
        found
    }
}

struct Search<'a> {
    m: &'a Structure,
    order: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    incident: Vec<Vec<(usize, usize)>>,
    image: Vec<Option<usize>>,
    used: Vec<bool>,
    found: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn extend(&mut self, depth: usize) {
        if depth == self.order.len() {
            self.found.push(self.image.iter().map(|y| y.expect("complete assignment")).collect());
            return;
        }
        let x = self.order[depth];
        for ci in 0..self.candidates[x].len() {
            let y = self.candidates[x][ci];
            if self.used[y] {
                continue;
            }
            self.image[x] = Some(y);
            self.used[y] = true;
            if self.consistent(x) {
                self.extend(depth + 1);
            }
            self.used[y] = false;
            self.image[x] = None;
        }
    }

    /// Every tuple through `x` whose entries are all assigned maps into its
    /// relation.
    fn consistent(&self, x: usize) -> bool {
        let mut img = Vec::with_capacity(3);
        self.incident[x].iter().all(|&(ri, ti)| {
            let rel = &self.m.relations[ri];
            img.clear();
            for &z in &rel.tuples[ti] {
                match self.image[z] {
                    Some(y) => img.push(y),
                    None => return true,
                }
            }
            rel.contains(&img)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{CayleyTable, FiniteGroupSystem};
    use super::*;
    use crate::poset::DirectedSet;

    /// All permutations of the domain, filtered by the definition.
    fn brute_force(m: &Structure) -> Vec<Vec<usize>> {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            perms(n - 1)
                .into_iter()
                .flat_map(|p| {
                    (0..n).map(move |i| {
                        let mut q = p.clone();
                        q.insert(i, n - 1);
                        q
                    })
                })
                .collect()
        }
        let mut out: Vec<_> = perms(m.len()).into_iter().filter(|p| m.is_automorphism(p).is_ok()).collect();
        out.sort();
        out
    }

    #[test]
    fn one_point_z2_has_two() {
        let m = Structure::build(&one_point(2)).unwrap();
        let auts = m.automorphisms();
        assert_eq!(auts.len(), 2);
        assert_eq!(auts, brute_force(&m));
    }

    #[test]
    fn z4_chain_has_four() {
        let m = Structure::build(&z4_to_z2()).unwrap();
        let auts = m.automorphisms();
        assert_eq!(auts.len(), 4);
        assert!(auts.iter().all(|p| m.is_automorphism(p).is_ok()));
    }

    #[test]
    fn vee_over_trivial_top() {
        // incomparable p, q joined by a trivial group on top
        let base = DirectedSet::from_pairs(&["p", "q", "t"], &[("p", "t"), ("q", "t")]).unwrap();
        let groups = vec![CayleyTable::cyclic(2), CayleyTable::cyclic(3), CayleyTable::cyclic(1)];
        let homs = vec![
            super::super::Hom { lower: 0, upper: 2, map: vec![0] },
            super::super::Hom { lower: 1, upper: 2, map: vec![0] },
        ];
        let sys = FiniteGroupSystem::new(base, groups, homs).unwrap();
        let m = Structure::build(&sys).unwrap();
        // the trivial top forces both coefficients to be trivial
        assert_eq!(m.automorphisms().len(), sys.limit_elements().unwrap().len());
        assert_eq!(m.automorphisms().len(), 1);
    }

    #[test]
    fn unrelated_structure() {
        // a 4-cycle as a symmetric binary relation, one vertex named
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0)];
        let tuples = edges.iter().flat_map(|&(a, b)| [vec![a, b], vec![b, a]]).collect();
        let mut m = Structure::build(&one_point(2)).unwrap();
        m.domain.truncate(4);
        m.constants = vec![0];
        m.relations = vec![super::super::Relation::new("E".into(), 2, tuples)];
        // stabilizer of a vertex in the dihedral group of order 8
        assert_eq!(m.automorphisms().len(), 2);
        assert_eq!(m.automorphisms(), brute_force(&m));
    }
}

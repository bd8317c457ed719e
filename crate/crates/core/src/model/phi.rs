//! The map sending an automorphism to its translation coefficients, and a
//! brute-force check that it is an isomorphism onto the inverse limit.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::structure::Structure;
use super::{FiniteGroupSystem, ModelError};

/// An automorphism with its coefficients `c_q`, so that
/// `<g,q,0> -> <c_q * g, q, 0>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    pub perm: Vec<usize>,
    pub coefficients: Vec<usize>,
}

impl Structure {
    /// Reads `c_q` off the image of `<1,q,0>` and checks that `perm` is the
    /// left translation by `c_q` on every `P_q`.
    pub fn extract_coefficients(&self, sys: &FiniteGroupSystem, perm: &[usize]) -> Result<Vec<usize>, ModelError> {
        let mut coeffs = Vec::with_capacity(self.point_count());
        for q in 0..self.point_count() {
            let grp = sys.group(q);
            let violated = |g: usize| ModelError::TranslationFormViolated {
                point: self.point_name(q).to_string(),
                elem: grp.name(g).to_string(),
            };
            let img = self.domain[perm[self.index(grp.identity(), q, 0)]];
            if img.q != q || img.i != 0 {
                return Err(violated(grp.identity()));
            }
            let c = img.g;
            if let Some(g) = (0..grp.order()).find(|&g| perm[self.index(g, q, 0)] != self.index(grp.mul(c, g), q, 0)) {
                return Err(violated(g));
            }
            coeffs.push(c);
        }
        Ok(coeffs)
    }

    /// The permutation translating each `P_q` by `g_q` and fixing every
    /// other element, verified against the definition.
    pub fn sigma_from_limit(&self, sys: &FiniteGroupSystem, family: &[usize]) -> Result<Automorphism, ModelError> {
        sys.check_family(family)?;
        let perm: Vec<usize> = self
            .domain
            .iter()
            .map(|t| if t.i == 0 { self.index(sys.group(t.q).mul(family[t.q], t.g), t.q, 0) } else { self.index(t.g, t.q, t.i) })
            .collect();
        self.is_automorphism(&perm).map_err(ModelError::NotAnAutomorphism)?;
        Ok(Automorphism { perm, coefficients: family.to_vec() })
    }
}

/// Outcome of checking that the coefficient map is an isomorphism
/// `Aut(M) -> G_I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiReport {
    pub domain_size: usize,
    pub automorphisms: usize,
    pub limit_size: usize,
    /// Automorphisms that are not translations; nonzero would be a
    /// counterexample.
    pub translation_failures: usize,
    pub injective: bool,
    pub surjective: bool,
    pub homomorphism: bool,
    /// Closed under composition and inverses.
    pub closed: bool,
    /// Coefficients and translations invert each other.
    pub round_trip: bool,
    pub pass: bool,
}

fn compose(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&x| outer[x]).collect()
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (x, &y) in perm.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

/// Builds the structure, enumerates its automorphisms by search, and checks
/// that the coefficient map is a bijective homomorphism onto the coherent
/// families.
pub fn verify_phi_isomorphism(sys: &FiniteGroupSystem) -> Result<PhiReport, ModelError> {
    let m = Structure::build(sys)?;
    let auts = m.automorphisms();
    let limit = sys.limit_elements()?;

    let mut coeffs: Vec<Option<Vec<usize>>> = Vec::with_capacity(auts.len());
    for perm in &auts {
        coeffs.push(m.extract_coefficients(sys, perm).ok());
    }
    let translation_failures = coeffs.iter().filter(|c| c.is_none()).count();
    let extracted: Vec<Vec<usize>> = coeffs.iter().flatten().cloned().collect();
    let distinct: BTreeSet<&Vec<usize>> = extracted.iter().collect();
    let injective = translation_failures == 0 && distinct.len() == auts.len();
    let targets: BTreeSet<&Vec<usize>> = limit.iter().collect();
    let surjective = distinct == targets;

    let index: HashMap<&Vec<usize>, usize> = auts.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut homomorphism = translation_failures == 0;
    let mut closed = true;
    for (i, s1) in auts.iter().enumerate() {
        closed &= index.contains_key(&inverse(s1));
        for (j, s0) in auts.iter().enumerate() {
            let comp = compose(s1, s0);
            closed &= index.contains_key(&comp);
            if let (Some(c1), Some(c0)) = (&coeffs[i], &coeffs[j]) {
                let expected: Vec<usize> = (0..c1.len()).map(|q| sys.group(q).mul(c1[q], c0[q])).collect();
                homomorphism &= m.extract_coefficients(sys, &comp).is_ok_and(|c| c == expected);
            }
        }
    }
    let round_trip = translation_failures == 0
        && auts.iter().zip(&extracted).all(|(p, c)| m.sigma_from_limit(sys, c).is_ok_and(|a| &a.perm == p))
        && limit.iter().all(|g| {
            m.sigma_from_limit(sys, g).is_ok_and(|a| m.extract_coefficients(sys, &a.perm).is_ok_and(|c| &c == g))
        });
    let pass = injective && surjective && homomorphism && closed && round_trip && auts.len() == limit.len();
    Ok(PhiReport {
        domain_size: m.len(),
        automorphisms: auts.len(),
        limit_size: limit.len(),
        translation_failures,
        injective,
        surjective,
        homomorphism,
        closed,
        round_trip,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn one_point_z2() {
        let r = verify_phi_isomorphism(&one_point(2)).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!((r.automorphisms, r.limit_size), (2, 2));
    }

    #[test]
    fn z4_chain() {
        let r = verify_phi_isomorphism(&z4_to_z2()).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!((r.automorphisms, r.limit_size), (4, 4));
    }

    #[test]
    fn vee_with_top_projections() {
        let r = verify_phi_isomorphism(&vee_with_top()).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!((r.automorphisms, r.limit_size), (4, 4));
    }

    #[test]
    fn sigma_of_generator_has_order_four() {
        let sys = z4_to_z2();
        let m = Structure::build(&sys).unwrap();
        let a = m.sigma_from_limit(&sys, &[1, 1]).unwrap();
        let mut p = a.perm.clone();
        let id: Vec<usize> = (0..m.len()).collect();
        let mut order = 1;
        while p != id {
            p = compose(&a.perm, &p);
            order += 1;
        }
        assert_eq!(order, 4);
        assert_eq!(m.extract_coefficients(&sys, &a.perm).unwrap(), vec![1, 1]);
    }

    #[test]
    fn sigma_rejects_incoherent_family() {
        let sys = z4_to_z2();
        let m = Structure::build(&sys).unwrap();
        assert_eq!(m.sigma_from_limit(&sys, &[0, 1]), Err(ModelError::Incoherent { p: "p".into(), q: "q".into() }));
        let id = m.sigma_from_limit(&sys, &[0, 0]).unwrap();
        assert_eq!(id.perm, (0..m.len()).collect::<Vec<_>>());
    }
}

use std::collections::HashSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use invlim_core::grouplimit::{GroupElem, GroupSystem, Variant};
use invlim_core::invsys::{InverseSystem, Tree};
use invlim_core::poset::Point;

/// A small system: a restriction system or the level system of a random tree.
fn system() -> impl Strategy<Value = InverseSystem> {
    prop_oneof![
        (1usize..=3).prop_map(|n| InverseSystem::restriction(n).unwrap()),
        (any::<u64>(), 1usize..=15).prop_map(|(seed, n)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Tree::random(&mut rng, n).unwrap().inverse_system().unwrap()
        }),
    ]
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Free), Just(Variant::Abelian)]
}

fn setup() -> impl Strategy<Value = (GroupSystem, u64)> {
    (system(), variant(), any::<u64>()).prop_map(|(s, v, seed)| (GroupSystem::new(s, v), seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn length_is_monotone((g, seed) in setup()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = g.random_element(&mut rng, 6, 3).unwrap();
        let v = x.values().unwrap();
        for (p, q) in g.carrier().base().comparable_pairs() {
            prop_assert!(v[p].complexity() <= v[q].complexity());
        }
    }

    #[test]
    fn every_element_is_coherent((g, seed) in setup()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = g.random_element(&mut rng, 6, 3).unwrap();
        let v = x.values().unwrap();
        for (p, q) in g.carrier().base().comparable_pairs() {
            prop_assert_eq!(&g.connect(p, q, &v[q]).unwrap(), &v[p]);
        }
    }

    #[test]
    fn decomposition_data_is_coherent((g, seed) in setup()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = g.random_element(&mut rng, 6, 3).unwrap();
        let d = g.decompose(&x).unwrap();
        let base = g.carrier().base();
        let s = d.stabilizer;
        prop_assert_eq!(d.len(), g.evaluate(&x, s).unwrap().complexity());
        // above the stabilizer the i-th generator pushes down term by term
        for (p, q) in base.comparable_pairs().filter(|&(p, _)| base.leq(s, p)) {
            let at = |r: Point| g.evaluate(&x, r).unwrap();
            match (at(p), at(q)) {
                (GroupElem::Free(wp), GroupElem::Free(wq)) => {
                    prop_assert_eq!(wp.syllable_length(), wq.syllable_length());
                    for (sp, sq) in wp.syllables().iter().zip(wq.syllables()) {
                        prop_assert_eq!(sp.0, g.carrier().map(p, q, sq.0));
                        prop_assert_eq!(sp.1, sq.1);
                    }
                }
                (GroupElem::Abelian(vp), GroupElem::Abelian(vq)) => {
                    // the connecting map is a coefficient-preserving bijection of supports
                    let image: HashSet<usize> = vq.entries().keys().map(|&a| g.carrier().map(p, q, a)).collect();
                    prop_assert_eq!(image.len(), vq.support_len());
                    prop_assert_eq!(vp.support_len(), vq.support_len());
                    for (&a, &k) in vq.entries() {
                        prop_assert_eq!(vp.coefficient(&g.carrier().map(p, q, a)), k);
                    }
                }
                _ => prop_assert!(false, "mixed variants"),
            }
        }
        for (t, _) in &d.terms {
            prop_assert!(g.carrier().is_thread(t));
        }
    }

    #[test]
    fn recompose_inverts_decompose((g, seed) in setup()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = g.random_element(&mut rng, 8, 3).unwrap();
        let d = g.decompose(&x).unwrap();
        prop_assert!(g.is_canonical(&d));
        prop_assert!(g.equal(&g.recompose(&d).unwrap(), &x).unwrap());
    }

    #[test]
    fn choice_of_upper_bound_does_not_matter((g, seed) in setup()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = g.random_element(&mut rng, 6, 3).unwrap();
        let base = g.carrier().base().clone();
        // the last bound in load order instead of the first
        let last = |set: &[Point]| {
            base.points()
                .rev()
                .find(|&u| set.iter().all(|&p| base.leq(p, u)))
                .ok_or_else(|| invlim_core::poset::PosetError::NoBound(vec![]))
        };
        prop_assert_eq!(g.decompose_with_bounds(&x, &last).unwrap(), g.decompose(&x).unwrap());
    }

    #[test]
    fn pointwise_operations((g, seed) in setup()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = g.random_element(&mut rng, 4, 2).unwrap();
        let b = g.random_element(&mut rng, 4, 2).unwrap();
        let c = g.random_element(&mut rng, 4, 2).unwrap();
        let left = g.multiply(&g.multiply(&a, &b).unwrap(), &c).unwrap();
        let right = g.multiply(&a, &g.multiply(&b, &c).unwrap()).unwrap();
        prop_assert!(g.equal(&left, &right).unwrap());
        let id = g.multiply(&a, &g.invert(&a).unwrap()).unwrap();
        prop_assert!(g.equal(&id, &g.identity()).unwrap());
    }

    #[test]
    fn basis_elements_decompose_to_themselves((g, seed) in setup()) {
        let threads = g.carrier().enumerate_threads().unwrap();
        let t = &threads[(seed as usize) % threads.len()];
        let b = g.basis_element(t).unwrap();
        let d = g.decompose(&b).unwrap();
        prop_assert_eq!(d.terms, vec![(t.clone(), 1)]);
        for p in g.carrier().base().points() {
            prop_assert_eq!(g.evaluate(&b, p).unwrap().complexity(), 1);
        }
    }
}

#[test]
fn stabilization_of_collapse_example() {
    let sys = invlim_core::io::load_system(
        &std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/collapse_system.json"),
    )
    .unwrap();
    let g = GroupSystem::new(sys, Variant::Free);
    let lits = [("p", "c^2"), ("q", "a.b")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    let x = g.eager_from_literals(&lits).unwrap();
    let s = g.stabilization_point(&x).unwrap();
    assert_eq!((g.carrier().base().name(s.point), s.length), ("q", 2));
    assert_eq!(g.evaluate(&x, 0).unwrap().complexity(), 1);
    let d = g.decompose(&x).unwrap();
    let names: Vec<_> = d.terms.iter().map(|(t, k)| (g.carrier().thread_names(t), *k)).collect();
    let thread = |a: &str| vec![("p".to_string(), "c".to_string()), ("q".to_string(), a.to_string())];
    assert_eq!(names, vec![(thread("a"), 1), (thread("b"), 1)]);
}

use proptest::prelude::*;

use invlim_core::model::{verify_phi_isomorphism, CayleyTable, FiniteGroupSystem, Hom, Structure};
use invlim_core::poset::DirectedSet;

/// A chain of cyclic groups `Z/n_0 <- Z/n_1 <- ...`, each order dividing the
/// next, with reduction maps; domain at most 60.
fn cyclic_chain() -> impl Strategy<Value = FiniteGroupSystem> {
    prop::collection::vec(prop_oneof![Just(1usize), Just(2), Just(3)], 1..=3).prop_filter_map("too large", |factors| {
        let orders: Vec<usize> = factors.iter().scan(1, |acc, &f| {
            *acc *= f;
            Some(*acc)
        }).collect();
        if 2 * orders.iter().sum::<usize>() > 60 {
            return None;
        }
        let names: Vec<String> = (0..orders.len()).map(|i| format!("p{i}")).collect();
        let pairs: Vec<(String, String)> = names.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        let base = DirectedSet::from_pairs(&names, &pairs).unwrap();
        let groups = orders.iter().map(|&n| CayleyTable::cyclic(n)).collect();
        let homs = (1..orders.len())
            .map(|i| Hom { lower: i - 1, upper: i, map: (0..orders[i]).map(|g| g % orders[i - 1]).collect() })
            .collect();
        Some(FiniteGroupSystem::new(base, groups, homs).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phi_is_an_isomorphism(sys in cyclic_chain()) {
        let r = verify_phi_isomorphism(&sys).unwrap();
        prop_assert!(r.pass, "{:?}", r);
        // the limit of a chain is its top group
        prop_assert_eq!(r.automorphisms, sys.groups().last().unwrap().order());
    }

    #[test]
    fn automorphisms_fix_constants_and_blocks(sys in cyclic_chain()) {
        let m = Structure::build(&sys).unwrap();
        for perm in m.automorphisms() {
            for &c in &m.constants {
                prop_assert_eq!(perm[c], c);
            }
            for (x, t) in m.domain.iter().enumerate() {
                let y = m.domain[perm[x]];
                prop_assert_eq!((y.q, y.i), (t.q, t.i));
            }
        }
    }

    #[test]
    fn phi_round_trips(sys in cyclic_chain()) {
        let m = Structure::build(&sys).unwrap();
        for fam in sys.limit_elements().unwrap() {
            let sigma = m.sigma_from_limit(&sys, &fam).unwrap();
            prop_assert_eq!(m.extract_coefficients(&sys, &sigma.perm).unwrap(), fam);
        }
        for perm in m.automorphisms() {
            let c = m.extract_coefficients(&sys, &perm).unwrap();
            prop_assert_eq!(m.sigma_from_limit(&sys, &c).unwrap().perm, perm);
        }
    }
}

#[test]
fn vee_over_nonabelian_top() {
    // S3 on top projecting onto Z/2 by sign, and a trivial group
    let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
    let idx = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
    let mul: Vec<Vec<usize>> = perms
        .iter()
        .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
        .collect();
    let s3 = CayleyTable::new((0..6).map(|i| format!("s{i}")).collect(), mul, 0).unwrap();
    let sign = vec![0, 1, 1, 1, 0, 0];
    let base = DirectedSet::from_pairs(&["p", "q", "r"], &[("p", "r"), ("q", "r")]).unwrap();
    let groups = vec![CayleyTable::cyclic(2), CayleyTable::cyclic(1), s3];
    let homs = vec![Hom { lower: 0, upper: 2, map: sign }, Hom { lower: 1, upper: 2, map: vec![0; 6] }];
    let sys = FiniteGroupSystem::new(base, groups, homs).unwrap();
    let r = verify_phi_isomorphism(&sys).unwrap();
    assert!(r.pass, "{r:?}");
    assert_eq!(r.automorphisms, 6);
}

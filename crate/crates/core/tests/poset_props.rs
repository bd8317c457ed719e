use proptest::prelude::*;

use invlim_core::poset::{
    judge_transcript, play_bounded, player_one_bound_strategy, DirectedSet, PosetError, SeededRandomStrategy, Side,
    Verdict,
};

/// Names `e0..e{n-1}` and a random relation on them.
fn relation() -> impl Strategy<Value = (Vec<String>, Vec<(String, String)>)> {
    (1usize..7).prop_flat_map(|n| {
        let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
        let pairs = prop::collection::vec((0..n, 0..n), 0..12);
        (Just(names), pairs)
    }).prop_map(|(names, pairs)| {
        let pairs = pairs.into_iter().map(|(a, b)| (names[a].clone(), names[b].clone())).collect();
        (names, pairs)
    })
}

/// The same relation with a fresh top element added.
fn directed() -> impl Strategy<Value = DirectedSet> {
    relation().prop_map(|(mut names, mut pairs)| {
        for n in &names {
            pairs.push((n.clone(), "top".into()));
        }
        names.push("top".into());
        DirectedSet::from_pairs(&names, &pairs).unwrap()
    })
}

/// Reflexive-transitive closure by repeated relaxation.
fn closure(n: usize, pairs: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in pairs {
        r[a][b] = true;
    }
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if r[a][b] && r[b][c] && !r[a][c] {
                        r[a][c] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return r;
        }
    }
}

proptest! {
    #[test]
    fn directedness_matches_pairwise_bounds((names, pairs) in relation()) {
        let idx = |s: &String| names.iter().position(|n| n == s).unwrap();
        let ip: Vec<(usize, usize)> = pairs.iter().map(|(a, b)| (idx(a), idx(b))).collect();
        let r = closure(names.len(), &ip);
        let n = names.len();
        let pairwise = (0..n).all(|a| (0..n).all(|b| (0..n).any(|c| r[a][c] && r[b][c])));
        match DirectedSet::from_pairs(&names, &pairs) {
            Ok(d) => {
                prop_assert!(pairwise);
                for a in 0..n {
                    for b in 0..n {
                        prop_assert_eq!(d.leq(a, b), r[a][b]);
                    }
                }
            }
            Err(PosetError::NotDirected(..)) => prop_assert!(!pairwise),
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn upper_bound_is_the_first_bound(d in directed(), set in prop::collection::vec(0usize..7, 1..4)) {
        let set: Vec<usize> = set.into_iter().map(|p| p % d.len()).collect();
        let u = d.upper_bound(&set).unwrap();
        prop_assert!(set.iter().all(|&p| d.leq(p, u)));
        prop_assert!((0..u).all(|v| !set.iter().all(|&p| d.leq(p, v))));
    }

    #[test]
    fn bound_strategy_wins(d in directed(), seed in any::<u64>(), rounds in 1usize..10) {
        let one = player_one_bound_strategy(&d);
        let two = SeededRandomStrategy { side: Side::II, seed, elements: d.len() };
        let t = play_bounded(&d, &one, &two, rounds).unwrap();
        prop_assert!(t.verdict.favours_player_one());
        // deterministic in the seed
        prop_assert_eq!(play_bounded(&d, &one, &two, rounds).unwrap(), t);
    }

    #[test]
    fn finite_runs_are_never_undecided(d in directed(), moves in prop::collection::vec(0usize..7, 1..10)) {
        let moves: Vec<usize> = moves.into_iter().map(|p| p % d.len()).collect();
        prop_assert_ne!(judge_transcript(&d, &moves).unwrap().verdict, Verdict::Undecided);
    }
}

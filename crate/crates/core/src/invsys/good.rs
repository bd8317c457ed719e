//! The three-clause goodness check at finite scale.
//!
//! Clause (1) asks that Player II has no winning strategy in the ascent game
//! on the base; it is only ever reported as holding when a Player I winning
//! strategy has been exhibited. Clauses (2) and (3) compare exact finite
//! counts against the caller's bounds.

use serde::Serialize;

use super::InverseSystem;
use crate::poset::{play_bounded, player_one_bound_strategy, ScriptedStrategy, Side};

/// Rounds played when sanity-checking the Player I witness.
const WITNESS_ROUNDS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum GameCondition {
    /// The bound-playing strategy wins; `maximum` bounds every run.
    HoldsWithWitness { maximum: String, runs_checked: usize },
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    Game,
    Size,
    LimitSize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoodnessReport {
    pub lambda: usize,
    pub nu: usize,
    pub game: GameCondition,
    /// `|D|`, when the base is finite.
    pub points: Option<usize>,
    pub max_fiber: usize,
    pub size_ok: Option<bool>,
    /// `|A_I|`, when it could be enumerated.
    pub threads: Option<usize>,
    pub limit_ok: Option<bool>,
    pub good: bool,
    pub failing: Option<Clause>,
    pub note: String,
}

const NOTE: &str = "limit size is compared for equality with nu; infinite \
                    constructions may only bound it from below";

/// Checks whether `system` is `(lambda, nu)`-good with finite counts standing
/// in for the cardinals.
pub fn check_good(system: &InverseSystem, lambda: usize, nu: usize) -> GoodnessReport {
    let base = system.base();
    let game = match base.maximum() {
        Some(top) => {
            let one = player_one_bound_strategy(base);
            let wins = base.points().all(|p| {
                let two = ScriptedStrategy { side: Side::II, moves: vec![p] };
                play_bounded(base, &one, &two, WITNESS_ROUNDS).is_ok_and(|t| t.verdict.favours_player_one())
            });
            if wins {
                GameCondition::HoldsWithWitness { maximum: base.name(top).to_string(), runs_checked: base.len() }
            } else {
                GameCondition::Unknown
            }
        }
        None => GameCondition::Unknown,
    };
    let points = base.is_finite().then(|| base.len());
    let max_fiber = system.max_fiber();
    let size_ok = points.map(|n| n <= lambda && max_fiber <= lambda);
    let threads = system.enumerate_threads().ok().map(|t| t.len());
    let limit_ok = threads.map(|t| t == nu);

    let failing = if game == GameCondition::Unknown {
        Some(Clause::Game)
    } else if size_ok != Some(true) {
        Some(Clause::Size)
    } else if limit_ok != Some(true) {
        Some(Clause::LimitSize)
    } else {
        None
    };
    GoodnessReport {
        lambda,
        nu,
        game,
        points,
        max_fiber,
        size_ok,
        threads,
        limit_ok,
        good: failing.is_none(),
        failing,
        note: NOTE.to_string(),
    }
}

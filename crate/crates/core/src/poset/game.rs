//! The ascent game on a directed set.
//!
//! Player I moves at even positions, Player II at odd ones. Player I wins a
//! run if Player II ever fails to climb above Player I's previous move, or if
//! Player I always climbs above Player II and the whole run has an upper
//! bound. Only finite prefixes are ever played here, so apart from the
//! immediate win every verdict is provisional.


use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{DirectedSet, Point, PosetError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    I,
    II,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Player II failed to move above Player I: decided for every extension.
    IImmediate,
    /// No ascent broken so far and all moves are bounded.
    IProvisional,
    /// Player I failed to move above Player II.
    IIProvisional,
    /// Nothing broken, but no bound for the moves among loaded elements.
    Undecided,
}

impl Verdict {
    pub fn favours_player_one(self) -> bool {
        matches!(self, Verdict::IImmediate | Verdict::IProvisional)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::IImmediate => "I-immediate",
            Verdict::IProvisional => "I-provisional",
            Verdict::IIProvisional => "II-provisional",
            Verdict::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameTranscript {
    pub moves: Vec<Point>,
    pub verdict: Verdict,
    /// Round at which the verdict was fixed; for provisional verdicts and
    /// `Undecided` this is the last round played.
    pub round: usize,
}

/// A deterministic rule producing the next move from the moves so far.
pub trait Strategy {
    fn side(&self) -> Side;
    fn respond(&self, prefix: &[Point]) -> Result<Point, PosetError>;
}

/// Judges a finite run. Moves must be loaded points; the last move may belong
/// to either player.
pub fn judge_transcript(set: &DirectedSet, moves: &[Point]) -> Result<GameTranscript, PosetError> {
    if moves.is_empty() {
        return Err(PosetError::MalformedTranscript("no moves".into()));
    }
    if let Some(&bad) = moves.iter().find(|&&m| m >= set.len()) {
        return Err(PosetError::MalformedTranscript(format!("move {bad} is not a loaded element")));
    }
    let last_round = (moves.len() - 1) / 2;
    let done = |verdict, round| Ok(GameTranscript { moves: moves.to_vec(), verdict, round });

    let immediate = (0..).take_while(|i| 2 * i + 1 < moves.len()).find(|&i| !set.leq(moves[2 * i], moves[2 * i + 1]));
    if let Some(i) = immediate {
        return done(Verdict::IImmediate, i);
    }
    let broken = (0..).take_while(|i| 2 * i + 2 < moves.len()).find(|&i| !set.leq(moves[2 * i + 1], moves[2 * i + 2]));
    if let Some(i) = broken {
        return done(Verdict::IIProvisional, i);
    }
    match set.upper_bound(moves) {
        Ok(_) => done(Verdict::IProvisional, last_round),
        Err(PosetError::NoBound(_)) => done(Verdict::Undecided, last_round),
        Err(e) => Err(e),
    }
}

/// Plays `rounds` rounds, stopping early once Player II fails to climb, and
/// judges the result.
pub fn play_bounded(
    set: &DirectedSet,
    player_one: &dyn Strategy,
    player_two: &dyn Strategy,
    rounds: usize,
) -> Result<GameTranscript, PosetError> {
    if rounds == 0 {
        return Err(PosetError::NoRounds);
    }
    let mut moves = Vec::with_capacity(2 * rounds);
    for _ in 0..rounds {
        let a = checked_move(set, player_one.respond(&moves)?)?;
        moves.push(a);
        let b = checked_move(set, player_two.respond(&moves)?)?;
        moves.push(b);
        if !set.leq(a, b) {
            break;
        }
    }
    judge_transcript(set, &moves)
}

fn checked_move(set: &DirectedSet, p: Point) -> Result<Point, PosetError> {
    if p < set.len() {
        Ok(p)
    } else {
        Err(PosetError::MalformedTranscript(format!("strategy produced unloaded element {p}")))
    }
}

/// Player I answers every position with the least upper bound (in load order)
/// of all moves so far, opening with the first loaded element.
pub struct BoundStrategy<'a> {
    set: &'a DirectedSet,
}

pub fn player_one_bound_strategy(set: &DirectedSet) -> BoundStrategy<'_> {
    BoundStrategy { set }
}

impl Strategy for BoundStrategy<'_> {
    fn side(&self) -> Side {
        Side::I
    }

    fn respond(&self, prefix: &[Point]) -> Result<Point, PosetError> {
        if prefix.is_empty() {
            return Ok(0);
        }
        let mut seen = prefix.to_vec();
        seen.sort_unstable();
        seen.dedup();
        self.set.upper_bound(&seen)
    }
}

/// Plays a fixed list of moves, one per own turn, repeating the last one.
#[derive(Debug, Clone)]
pub struct ScriptedStrategy {
    pub side: Side,
    pub moves: Vec<Point>,
}

impl Strategy for ScriptedStrategy {
    fn side(&self) -> Side {
        self.side
    }

    fn respond(&self, prefix: &[Point]) -> Result<Point, PosetError> {
        let k = prefix.len() / 2;
        self.moves
            .get(k)
            .or(self.moves.last())
            .copied()
            .ok_or_else(|| PosetError::MalformedTranscript("empty script".into()))
    }
}

/// Uniform random moves that are still a function of the prefix: the seed and
/// the prefix are hashed into a fresh generator on every call.
#[derive(Debug, Clone)]
pub struct SeededRandomStrategy {
    pub side: Side,
    pub seed: u64,
    pub elements: usize,
}

impl Strategy for SeededRandomStrategy {
    fn side(&self) -> Side {
        self.side
    }

    fn respond(&self, prefix: &[Point]) -> Result<Point, PosetError> {
        // splitmix-style fold, stable across toolchains unlike std's hasher
        let h = prefix.iter().fold(mix(self.seed), |h, &p| mix(h ^ p as u64));
        let mut rng = ChaCha8Rng::seed_from_u64(mix(h ^ prefix.len() as u64));
        Ok(rng.random_range(0..self.elements))
    }
}

fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Adapts a closure.
pub struct FnStrategy<F> {
    pub side: Side,
    pub f: F,
}

impl<F: Fn(&[Point]) -> Result<Point, PosetError>> Strategy for FnStrategy<F> {
    fn side(&self) -> Side {
        self.side
    }

    fn respond(&self, prefix: &[Point]) -> Result<Point, PosetError> {
        (self.f)(prefix)
    }
}

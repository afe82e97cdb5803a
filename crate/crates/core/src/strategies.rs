//! Openings, offensive and blocking moves, and the four strategy pairs.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::board::{Amplitudes, BoardError, GameState, Line, Move, Player};
use crate::optimizer::{maximizing_move, ConstraintSet, StationarySolution};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StrategyError {
    #[error("no maximizing move found on any line for {player}")]
    NotFound { player: Player },
    #[error("only {available} of the opponent's maximizing moves are available for blocking")]
    TooFewThreats { available: usize },
    #[error("blocking superposition vanished after projection")]
    DegenerateBlock,
    #[error(transparent)]
    Board(#[from] BoardError),
}

impl StrategyError {
    /// True for the failures that end a game prematurely.
    pub fn is_premature(&self) -> bool {
        !matches!(self, StrategyError::Board(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpeningKind {
    /// The centre site, b5.
    Classical,
    /// Amplitude 1/3 on every site.
    Uniform,
    /// Isotropic random unit vector.
    Random,
}

named_enum!(OpeningKind { Classical => "classical", Uniform => "uniform", Random => "random" });

pub fn opening_move<R: Rng + ?Sized>(kind: OpeningKind, rng: &mut R) -> Move {
    match kind {
        OpeningKind::Classical => Move::classical(5),
        OpeningKind::Uniform => Move::uniform(),
        OpeningKind::Random => GameState::new().random_move(rng).expect("empty board has room"),
    }
}

/// How one side of a strategy pair plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stance {
    /// Always the offensive move.
    Win,
    /// Always the weighted blocking move.
    Block,
    /// Offensive unless the blocking trigger fires.
    WinBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyPair {
    Wb,
    Wbb,
    Wwb,
    Wbwb,
}

named_enum!(StrategyPair { Wb => "wb", Wbb => "wbb", Wwb => "wwb", Wbwb => "wbwb" });

impl StrategyPair {
    pub fn stance(self, player: Player) -> Stance {
        use Stance::*;
        let (p1, p2) = match self {
            StrategyPair::Wb => (Win, Block),
            StrategyPair::Wbb => (WinBlock, Block),
            StrategyPair::Wwb => (Win, WinBlock),
            StrategyPair::Wbwb => (WinBlock, WinBlock),
        };
        match player {
            Player::One => p1,
            Player::Two => p2,
        }
    }
}

/// Switch to blocking when the opponent's pre-winning weight exceeds two and
/// is larger than one's own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockingTrigger {
    pub omega_self: f64,
    pub omega_opp: f64,
}

impl BlockingTrigger {
    pub fn for_state(state: &GameState, player: Player) -> BlockingTrigger {
        BlockingTrigger {
            omega_self: state.weight_report(player).max_weight,
            omega_opp: state.weight_report(player.opponent()).max_weight,
        }
    }

    pub fn fires(&self) -> bool {
        self.omega_opp > 2.0 && self.omega_self < self.omega_opp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Offensive,
    Defensive,
}

pub fn decide(stance: Stance, trigger: BlockingTrigger) -> Decision {
    match stance {
        Stance::Win => Decision::Offensive,
        Stance::Block => Decision::Defensive,
        Stance::WinBlock if trigger.fires() => Decision::Defensive,
        Stance::WinBlock => Decision::Offensive,
    }
}

/// Maximizing move of `player` along every line where one is found, in
/// canonical line order.
pub fn maximizing_moves<R: Rng + ?Sized>(
    state: &GameState,
    player: Player,
    rng: &mut R,
    restarts: usize,
) -> Vec<(Line, StationarySolution)> {
    Line::ALL
        .into_iter()
        .filter_map(|line| {
            let cs = ConstraintSet::from_state(state, player, line);
            maximizing_move(&cs, rng, restarts).ok().map(|sol| (line, sol))
        })
        .collect()
}

/// Sorted by weight, largest first; equal weights keep canonical line order.
fn ranked(mut sols: Vec<(Line, StationarySolution)>) -> Vec<(Line, StationarySolution)> {
    sols.sort_by(|a, b| b.1.weight.total_cmp(&a.1.weight));
    sols
}

/// The maximizing move with the largest weight over all eight lines.
pub fn offensive_move<R: Rng + ?Sized>(
    state: &GameState,
    player: Player,
    rng: &mut R,
    restarts: usize,
) -> Result<(Line, StationarySolution), StrategyError> {
    ranked(maximizing_moves(state, player, rng, restarts))
        .into_iter()
        .next()
        .ok_or(StrategyError::NotFound { player })
}

/// Normalized superposition `W1 x1 + W2 x2 + W3 x3` of the opponent's three
/// best maximizing moves, re-projected against the history.
pub fn weighted_blocking_move<R: Rng + ?Sized>(
    state: &GameState,
    defender: Player,
    rng: &mut R,
    restarts: usize,
) -> Result<Move, StrategyError> {
    let threats = ranked(maximizing_moves(state, defender.opponent(), rng, restarts));
    weighted_superposition(state, &threats)
}

pub(crate) fn weighted_superposition(
    state: &GameState,
    threats: &[(Line, StationarySolution)],
) -> Result<Move, StrategyError> {
    if threats.len() < 3 {
        return Err(StrategyError::TooFewThreats { available: threats.len() });
    }
    let y = threats[..3]
        .iter()
        .fold(Amplitudes::ZERO, |acc, (_, sol)| acc + *sol.x.amplitudes() * sol.weight);
    state.orthonormalize_against(&y).map_err(|e| match e {
        BoardError::DegenerateResidual { .. } => StrategyError::DegenerateBlock,
        other => StrategyError::Board(other),
    })
}

/// Plays the opponent's single best maximizing move.
pub fn single_best_blocking_move<R: Rng + ?Sized>(
    state: &GameState,
    defender: Player,
    rng: &mut R,
    restarts: usize,
) -> Result<Move, StrategyError> {
    let (_, sol) = offensive_move(state, defender.opponent(), rng, restarts)?;
    Ok(state.orthonormalize_against(sol.x.amplitudes())?)
}

/// Next move for `player` under `pair`. The opening is not handled here.
pub fn strategy_step<R: Rng + ?Sized>(
    pair: StrategyPair,
    state: &GameState,
    player: Player,
    rng: &mut R,
    restarts: usize,
) -> Result<Move, StrategyError> {
    match decide(pair.stance(player), BlockingTrigger::for_state(state, player)) {
        Decision::Offensive => offensive_move(state, player, rng, restarts).map(|(_, sol)| sol.x),
        Decision::Defensive => weighted_blocking_move(state, player, rng, restarts),
    }
}

use rayon::prelude::*;
use serde::Serialize;

use crate::board::{GameState, Line, Move, Player};
use crate::optimizer::{maximizing_move, ConstraintSet};
use crate::rng::substream;
use crate::strategies::{single_best_blocking_move, weighted_blocking_move};

pub const DEFAULT_BIN_WIDTH: f64 = 0.05;
/// Games simulated per parallel batch while harvesting.
const HARVEST_BATCH: u64 = 1024;

/// A position with three player-1 moves and two player-2 moves, taken from a
/// random game that player 1 went on to win with their fourth move.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndGame {
    /// Index of the random game it was cut from.
    pub game: u64,
    pub state: GameState,
    /// Player 1's current maximum line weight.
    pub omega: f64,
    /// The line on which `omega` is attained.
    pub pre_line: Line,
}

fn harvest_one(seed: u64, game: u64) -> Option<EndGame> {
    let mut rng = substream(seed, game);
    let mut state = GameState::new();
    let mut cut = None;
    while let Some(player) = state.to_move() {
        let mv = state.random_move(&mut rng).expect("board not full");
        state = state.apply_move(player, &mv).expect("random moves are legal");
        if state.total_moves() == 5 {
            cut = Some(state.clone());
        }
        if state.is_win(player) {
            if player == Player::One && state.moves(player).len() == 4 {
                let state = cut?;
                let report = state.weight_report(Player::One);
                return Some(EndGame { game, omega: report.max_weight, pre_line: report.max_line, state });
            }
            return None;
        }
    }
    None
}

/// Plays random quantum games until `n_target` end games are collected,
/// keeping the lowest game indices so the result does not depend on threads.
pub fn harvest_endgames(n_target: usize, seed: u64) -> Vec<EndGame> {
    let mut found = Vec::with_capacity(n_target);
    let mut next = 0u64;
    while found.len() < n_target {
        let batch: Vec<EndGame> = (next..next + HARVEST_BATCH)
            .into_par_iter()
            .filter_map(|g| harvest_one(seed, g))
            .collect();
        found.extend(batch);
        next += HARVEST_BATCH;
    }
    found.truncate(n_target);
    found
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockMode {
    /// Superposition of the attacker's three best maximizing moves.
    Weighted,
    /// A random legal move.
    Random,
    /// The attacker's single best maximizing move.
    SingleBest,
}

named_enum!(BlockMode { Weighted => "weighted", Random => "random", SingleBest => "single_best" });

/// Player 2 blocks, then player 1 plays their maximizing move along the
/// pre-winning line. `Some(true)` if player 1 has not won after that, `None`
/// if either move could not be produced.
pub fn blocking_outcome(endgame: &EndGame, mode: BlockMode, seed: u64, index: u64, restarts: usize) -> Option<bool> {
    let mut rng = substream(seed, index);
    let state = &endgame.state;
    let block: Move = match mode {
        BlockMode::Weighted => weighted_blocking_move(state, Player::Two, &mut rng, restarts).ok()?,
        BlockMode::Random => state.random_move(&mut rng).ok()?,
        BlockMode::SingleBest => single_best_blocking_move(state, Player::Two, &mut rng, restarts).ok()?,
    };
    let state = state.apply_move(Player::Two, &block).ok()?;
    let cs = ConstraintSet::from_state(&state, Player::One, endgame.pre_line);
    let z1 = maximizing_move(&cs, &mut rng, restarts).ok()?;
    let state = state.apply_move(Player::One, &z1.x).ok()?;
    Some(!state.is_win(Player::One))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveBin {
    pub omega_lo: f64,
    pub omega_hi: f64,
    pub n: u64,
    pub blocked: u64,
}

impl CurveBin {
    pub fn rate(&self) -> Option<f64> {
        (self.n > 0).then(|| self.blocked as f64 / self.n as f64)
    }
}

/// Block rate against pre-winning weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockingCurve {
    pub mode: BlockMode,
    pub bin_width: f64,
    pub bins: Vec<CurveBin>,
    /// End games where a blocking or winning move could not be found.
    pub unresolved: u64,
}

impl BlockingCurve {
    pub fn n(&self) -> u64 {
        self.bins.iter().map(|b| b.n).sum()
    }

    pub fn blocked(&self) -> u64 {
        self.bins.iter().map(|b| b.blocked).sum()
    }

    pub fn overall_rate(&self) -> Option<f64> {
        let n = self.n();
        (n > 0).then(|| self.blocked() as f64 / n as f64)
    }

    /// Pooled rate over the `count` highest bins.
    pub fn top_rate(&self, count: usize) -> Option<f64> {
        let top = &self.bins[self.bins.len().saturating_sub(count)..];
        let n: u64 = top.iter().map(|b| b.n).sum();
        (n > 0).then(|| top.iter().map(|b| b.blocked).sum::<u64>() as f64 / n as f64)
    }
}

/// Bins of width `bin_width` from the multiple of `bin_width` just below the
/// smallest omega up to 3.
pub fn blocking_effectiveness(
    endgames: &[EndGame],
    mode: BlockMode,
    seed: u64,
    restarts: usize,
    bin_width: f64,
) -> BlockingCurve {
    assert!(bin_width > 0.0, "bin width must be positive");
    let outcomes: Vec<Option<bool>> = endgames
        .par_iter()
        .enumerate()
        .map(|(i, e)| blocking_outcome(e, mode, seed, i as u64, restarts))
        .collect();

    let min_omega = endgames.iter().map(|e| e.omega).fold(f64::INFINITY, f64::min);
    let first = if min_omega.is_finite() { (min_omega / bin_width).floor() as i64 } else { 0 };
    let last = (3.0 / bin_width - 1e-9).ceil() as i64;
    let mut bins: Vec<CurveBin> = (first..last.max(first + 1))
        .map(|j| CurveBin {
            omega_lo: j as f64 * bin_width,
            omega_hi: ((j + 1) as f64 * bin_width).min(3.0),
            n: 0,
            blocked: 0,
        })
        .collect();
    let mut unresolved = 0;
    for (e, outcome) in endgames.iter().zip(outcomes) {
        let Some(blocked) = outcome else {
            unresolved += 1;
            continue;
        };
        let j = ((e.omega / bin_width).floor() as i64 - first).clamp(0, bins.len() as i64 - 1) as usize;
        bins[j].n += 1;
        bins[j].blocked += u64::from(blocked);
    }
    BlockingCurve { mode, bin_width, bins, unresolved }
}

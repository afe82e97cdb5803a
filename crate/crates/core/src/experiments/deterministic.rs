use rand::Rng;
use rayon::prelude::*;

use super::random::play_out;
use super::table::{GameOutcome, OutcomeTable};
use crate::board::GameState;
use crate::rng::substream;
use crate::strategies::{opening_move, strategy_step, OpeningKind, StrategyPair};

/// Player 1 opens with `opening`, then both sides follow `pair`. The game is
/// premature if a strategy cannot produce a move.
pub fn play_deterministic_game<R: Rng + ?Sized>(
    pair: StrategyPair,
    opening: OpeningKind,
    restarts: usize,
    rng: &mut R,
) -> GameOutcome {
    play_out(GameState::new(), |state, player| {
        if state.total_moves() == 0 {
            return Some(opening_move(opening, rng));
        }
        strategy_step(pair, state, player, rng, restarts)
            .map_err(|e| log::debug!("game abandoned at move {}: {e}", state.total_moves() + 1))
            .ok()
    })
}

pub fn run_deterministic(pair: StrategyPair, opening: OpeningKind, n: u64, seed: u64, restarts: usize) -> OutcomeTable {
    let outcomes: Vec<GameOutcome> = (0..n)
        .into_par_iter()
        .map(|i| play_deterministic_game(pair, opening, restarts, &mut substream(seed, i)))
        .collect();
    OutcomeTable::from_outcomes(outcomes)
}

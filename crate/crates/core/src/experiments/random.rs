use rand::Rng;
use rayon::prelude::*;

use super::table::{GameOutcome, OutcomeTable};
use crate::board::{GameState, Move, Player, SITES};
use crate::rng::substream;
use crate::strategies::{opening_move, OpeningKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameMode {
    /// Uniformly random empty site each turn.
    Classical,
    /// Isotropic random legal quantum move each turn.
    Quantum,
}

named_enum!(GameMode { Classical => "classical", Quantum => "quantum" });

/// Plays moves produced by `next` until a win or a full board.
pub(crate) fn play_out<F>(mut state: GameState, mut next: F) -> GameOutcome
where
    F: FnMut(&GameState, Player) -> Option<Move>,
{
    while let Some(player) = state.to_move() {
        let Some(mv) = next(&state, player) else {
            return GameOutcome::Premature;
        };
        state = match state.apply_move(player, &mv) {
            Ok(s) => s,
            Err(e) => {
                log::warn!("illegal generated move abandoned the game: {e}");
                return GameOutcome::Premature;
            }
        };
        if state.is_win(player) {
            return GameOutcome::Win { player, k: state.moves(player).len() };
        }
    }
    GameOutcome::Draw
}

/// One random game. `opening` fixes player 1's first move in quantum mode.
pub fn play_random_game<R: Rng + ?Sized>(mode: GameMode, opening: Option<OpeningKind>, rng: &mut R) -> GameOutcome {
    match mode {
        GameMode::Classical => {
            let mut free: Vec<usize> = (1..=SITES).collect();
            play_out(GameState::new(), |_, _| {
                let site = free.swap_remove(rng.random_range(0..free.len()));
                Some(Move::classical(site))
            })
        }
        GameMode::Quantum => play_out(GameState::new(), |state, _| match (state.total_moves(), opening) {
            (0, Some(kind)) => Some(opening_move(kind, rng)),
            _ => Some(state.random_move(rng).expect("board not full")),
        }),
    }
}

/// `n` random games, game `i` drawing from substream `i` of `seed`.
pub fn run_random_games(mode: GameMode, n: u64, seed: u64, opening: Option<OpeningKind>) -> OutcomeTable {
    assert!(opening.is_none() || mode == GameMode::Quantum, "openings apply to quantum games only");
    let outcomes: Vec<GameOutcome> = (0..n)
        .into_par_iter()
        .map(|i| play_random_game(mode, opening, &mut substream(seed, i)))
        .collect();
    OutcomeTable::from_outcomes(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let a = run_random_games(GameMode::Quantum, 200, 5, None);
        let b = run_random_games(GameMode::Quantum, 200, 5, None);
        assert_eq!(a, b);
        assert_eq!(a.total, 200);
        assert_eq!(a.premature, 0);
    }

    #[test]
    fn no_quantum_wins_before_fourth_move() {
        let t = run_random_games(GameMode::Quantum, 500, 11, Some(OpeningKind::Uniform));
        assert_eq!(t.p1_wins[..3].iter().sum::<u64>() + t.p2_wins[..3].iter().sum::<u64>(), 0);
    }

    #[test]
    fn classical_games_end_in_time() {
        let t = run_random_games(GameMode::Classical, 500, 3, None);
        assert_eq!(t.p1_wins[..2].iter().sum::<u64>(), 0);
        assert!(t.p1_wins[2] > 0);
        assert_eq!(t.wins(crate::board::Player::One) + t.wins(crate::board::Player::Two) + t.draws, 500);
    }
}

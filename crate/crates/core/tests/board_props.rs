mod common;

use proptest::prelude::*;
use qttt::board::{Amplitudes, GameState, Line, Move, Player, SITES};
use qttt::experiments::{enumerate_classical, OutcomeTable};
use qttt::rng::substream;

fn random_game(seed: u64, moves: usize) -> GameState {
    let mut rng = substream(seed, 0);
    let mut state = GameState::new();
    for _ in 0..moves {
        let p = state.to_move().unwrap();
        let mv = state.random_move(&mut rng).unwrap();
        state = state.apply_move(p, &mv).unwrap();
    }
    state
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gram_matrix_is_identity(seed in any::<u64>(), moves in 0usize..=9) {
        let state = random_game(seed, moves);
        let history: Vec<&Move> = state.history().map(|(_, m)| m).collect();
        for (i, a) in history.iter().enumerate() {
            for (j, b) in history.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((a.amplitudes().dot(b.amplitudes()) - expected).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn accumulated_norm_equals_move_count(seed in any::<u64>(), moves in 0usize..=9) {
        let state = random_game(seed, moves);
        for p in [Player::One, Player::Two] {
            let k = state.moves(p).len() as f64;
            prop_assert!((state.sum(p).norm_squared() - k).abs() < 1e-9);
        }
    }

    #[test]
    fn line_weight_bounded_by_move_count(seed in any::<u64>(), moves in 0usize..=9) {
        let state = random_game(seed, moves);
        for p in [Player::One, Player::Two] {
            let k = state.moves(p).len() as f64;
            for line in Line::ALL {
                let w = state.line_weight(p, line);
                prop_assert!((0.0..=k + 1e-9).contains(&w));
            }
        }
    }

    #[test]
    fn json_roundtrip_is_exact(seed in any::<u64>(), moves in 0usize..=9) {
        let state = random_game(seed, moves);
        let back = GameState::from_json(&state.to_json()).unwrap();
        prop_assert_eq!(&back, &state);
        prop_assert_eq!(back.to_json(), state.to_json());
    }

    #[test]
    fn orthonormalized_candidates_are_legal(seed in any::<u64>(), moves in 0usize..=8, raw in prop::array::uniform9(-5.0f64..5.0)) {
        let state = random_game(seed, moves);
        if let Ok(mv) = state.orthonormalize_against(&Amplitudes(raw)) {
            prop_assert!(state.validate_move(mv.amplitudes()).is_ok());
        }
    }
}

#[test]
fn classical_reduction_over_all_orderings() {
    let mut table = OutcomeTable::default();
    let mut count = 0;
    common::permutations(&mut Vec::new(), &mut [false; SITES], &mut |order| {
        let q = common::quantum_outcome(order);
        assert_eq!(q, common::classical_outcome(order), "ordering {order:?}");
        table.record(q);
        count += 1;
    });
    assert_eq!(count, 362_880);
    assert_eq!(table, enumerate_classical());
}

#[test]
fn random_moves_are_reproducible() {
    for seed in 0..20 {
        assert_eq!(random_game(seed, 9).to_json(), random_game(seed, 9).to_json());
    }
}

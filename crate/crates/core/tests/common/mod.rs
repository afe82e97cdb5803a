#![allow(dead_code)]

use qttt::board::{GameState, Line, Move, Player, SITES};
use qttt::experiments::GameOutcome;
use qttt::optimizer::ConstraintSet;
use qttt::rng::substream;
use rand::Rng;

/// Position after `k` random quantum moves.
pub fn random_state(seed: u64, k: usize) -> GameState {
    let mut rng = substream(seed, 1_000_003);
    let mut state = GameState::new();
    for _ in 0..k {
        let p = state.to_move().unwrap();
        let mv = state.random_move(&mut rng).unwrap();
        state = state.apply_move(p, &mv).unwrap();
    }
    state
}

/// Constraint set for the player to move after `k` (uniform in 0..=8)
/// random moves, along a random line.
pub fn random_constraint_set(seed: u64, index: u64) -> ConstraintSet {
    let mut rng = substream(seed, index);
    let k = rng.random_range(0..=8);
    let line = Line::ALL[rng.random_range(0..8)];
    let state = random_state(rng.random(), k);
    let player = state.to_move().unwrap_or(Player::One);
    ConstraintSet::from_state(&state, player, line)
}

/// Lagrange function written out directly.
pub fn lagrangian(cs: &ConstraintSet, z: &[f64]) -> f64 {
    let (x, rest) = z.split_at(9);
    let alpha = rest[0];
    let beta = &rest[1..];
    let own = cs.own();
    let w: f64 = cs.line().site_indices().iter().map(|&i| (own[i] + x[i]).powi(2)).sum();
    let norm: f64 = x.iter().map(|v| v * v).sum();
    let ortho: f64 = cs
        .previous()
        .iter()
        .zip(beta)
        .map(|(p, b)| b * (0..9).map(|i| p[i] * x[i]).sum::<f64>())
        .sum();
    w + alpha * (1.0 - norm) + ortho
}

/// Central second differences of the Lagrange function.
pub fn finite_difference_hessian(cs: &ConstraintSet, z: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = z.len();
    let eval = |di: usize, si: f64, dj: usize, sj: f64| {
        let mut p = z.to_vec();
        p[di] += si * h;
        p[dj] += sj * h;
        lagrangian(cs, &p)
    };
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (eval(i, 1., j, 1.) - eval(i, 1., j, -1.) - eval(i, -1., j, 1.) + eval(i, -1., j, -1.)) / (4. * h * h))
                .collect()
        })
        .collect()
}

/// Classical tic-tac-toe on bitmasks, independent of the quantum board.
pub fn classical_outcome(order: &[usize; 9]) -> GameOutcome {
    const LINES: [[usize; 3]; 8] = [[0, 1, 2], [3, 4, 5], [6, 7, 8], [0, 3, 6], [1, 4, 7], [2, 5, 8], [0, 4, 8], [2, 4, 6]];
    let mut owner = [0u8; 9];
    for (i, &site) in order.iter().enumerate() {
        let who = (i % 2) as u8 + 1;
        owner[site] = who;
        if LINES.iter().any(|l| l.iter().all(|&s| owner[s] == who)) {
            let player = if who == 1 { Player::One } else { Player::Two };
            return GameOutcome::Win { player, k: i / 2 + 1 };
        }
    }
    GameOutcome::Draw
}

pub fn quantum_outcome(order: &[usize; 9]) -> GameOutcome {
    let mut state = GameState::new();
    for &site in order {
        let p = state.to_move().unwrap();
        state = state.apply_move(p, &Move::classical(site + 1)).unwrap();
        if state.is_win(p) {
            return GameOutcome::Win { player: p, k: state.moves(p).len() };
        }
    }
    GameOutcome::Draw
}

pub fn permutations(prefix: &mut Vec<usize>, used: &mut [bool; SITES], visit: &mut impl FnMut(&[usize; 9])) {
    if prefix.len() == SITES {
        visit(prefix.as_slice().try_into().unwrap());
        return;
    }
    for s in 0..SITES {
        if !used[s] {
            used[s] = true;
            prefix.push(s);
            permutations(prefix, used, visit);
            prefix.pop();
            used[s] = false;
        }
    }
}

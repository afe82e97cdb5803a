use super::table::{GameOutcome, OutcomeTable};
use crate::board::{Line, Player};

/// 9!
pub const CLASSICAL_ORDERINGS: u64 = 362_880;

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn line_masks() -> [u16; 8] {
    Line::ALL.map(|l| l.site_indices().iter().fold(0u16, |m, &i| m | 1 << i))
}

/// Every ordering of the nine sites played out classically, a game ending at
/// the first completed line. Each game ending after `d` moves stands for the
/// `(9 - d)!` orderings that share its prefix.
pub fn enumerate_classical() -> OutcomeTable {
    let lines = line_masks();
    let mut table = OutcomeTable::default();
    descend(&lines, [0, 0], 0, &mut table);
    debug_assert_eq!(table.total, CLASSICAL_ORDERINGS);
    table
}

fn descend(lines: &[u16; 8], owned: [u16; 2], depth: u64, table: &mut OutcomeTable) {
    if depth == 9 {
        table.record(GameOutcome::Draw);
        return;
    }
    let mover = (depth % 2) as usize;
    let occupied = owned[0] | owned[1];
    for site in 0..9 {
        if occupied & (1 << site) != 0 {
            continue;
        }
        let mut next = owned;
        next[mover] |= 1 << site;
        if lines.iter().any(|&l| next[mover] & l == l) {
            let player = if mover == 0 { Player::One } else { Player::Two };
            let k = (depth / 2 + 1) as usize;
            table.record_weighted(GameOutcome::Win { player, k }, factorial(8 - depth));
        } else {
            descend(lines, next, depth + 1, table);
        }
    }
}

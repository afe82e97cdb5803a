use serde::Serialize;

use super::ExperimentError;
use crate::board::Player;

/// Rows per player: a player makes at most five moves.
pub const MAX_K: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum GameOutcome {
    /// `player` won right after their `k`-th move.
    Win { player: Player, k: usize },
    Draw,
    /// No move could be produced (the optimizer gave up).
    Premature,
}

/// Outcome counts of one experiment configuration.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct OutcomeTable {
    /// `p1_wins[k - 1]` games won by player 1 with their `k`-th move.
    pub p1_wins: [u64; MAX_K],
    pub p2_wins: [u64; MAX_K],
    pub draws: u64,
    pub premature: u64,
    pub total: u64,
}

impl OutcomeTable {
    pub fn record(&mut self, outcome: GameOutcome) {
        self.record_weighted(outcome, 1);
    }

    /// Records `count` games with the same outcome.
    pub fn record_weighted(&mut self, outcome: GameOutcome, count: u64) {
        match outcome {
            GameOutcome::Win { player, k } => {
                assert!((1..=MAX_K).contains(&k), "win at move {k}");
                match player {
                    Player::One => self.p1_wins[k - 1] += count,
                    Player::Two => self.p2_wins[k - 1] += count,
                }
            }
            GameOutcome::Draw => self.draws += count,
            GameOutcome::Premature => self.premature += count,
        }
        self.total += count;
    }

    pub fn from_outcomes<I: IntoIterator<Item = GameOutcome>>(outcomes: I) -> OutcomeTable {
        let mut table = OutcomeTable::default();
        for o in outcomes {
            table.record(o);
        }
        table
    }

    pub fn completed(&self) -> u64 {
        self.total - self.premature
    }

    pub fn wins(&self, player: Player) -> u64 {
        match player {
            Player::One => self.p1_wins.iter().sum(),
            Player::Two => self.p2_wins.iter().sum(),
        }
    }

    fn pct(&self, count: u64) -> f64 {
        100.0 * count as f64 / self.completed() as f64
    }

    /// Share of completed games won by `player`, in percent.
    pub fn win_pct(&self, player: Player) -> f64 {
        self.pct(self.wins(player))
    }

    /// Share of completed games won by `player` at move `k`, in percent.
    pub fn win_pct_at(&self, player: Player, k: usize) -> f64 {
        let count = match player {
            Player::One => self.p1_wins[k - 1],
            Player::Two => self.p2_wins[k - 1],
        };
        self.pct(count)
    }

    pub fn draw_pct(&self) -> f64 {
        self.pct(self.draws)
    }
}

/// One printed row. For `k = 5` the player-2 column holds the draws, since
/// player 2 never makes a fifth move; the trailing `draw` row repeats them and
/// the `premature` row gives abandoned games as a share of all games.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub k: String,
    pub p1_pct: Option<f64>,
    pub p2_pct: Option<f64>,
}

/// Table rows in percent of completed games.
pub fn summarize(table: &OutcomeTable) -> Result<Vec<ReportRow>, ExperimentError> {
    if table.completed() == 0 {
        return Err(ExperimentError::EmptyInput);
    }
    let mut rows: Vec<ReportRow> = (1..=MAX_K)
        .map(|k| ReportRow {
            k: k.to_string(),
            p1_pct: Some(table.win_pct_at(Player::One, k)),
            p2_pct: Some(if k == MAX_K { table.draw_pct() } else { table.win_pct_at(Player::Two, k) }),
        })
        .collect();
    rows.push(ReportRow { k: "draw".into(), p1_pct: Some(table.draw_pct()), p2_pct: None });
    rows.push(ReportRow {
        k: "premature".into(),
        p1_pct: Some(100.0 * table.premature as f64 / table.total as f64),
        p2_pct: None,
    });
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_draws() {
        let table = OutcomeTable::from_outcomes(std::iter::repeat_n(GameOutcome::Draw, 7));
        let rows = summarize(&table).unwrap();
        assert_eq!(rows[4].p2_pct, Some(100.0));
        assert_eq!(rows[4].p1_pct, Some(0.0));
        assert_eq!(rows[5].k, "draw");
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(summarize(&OutcomeTable::default()), Err(ExperimentError::EmptyInput)));
        let only_premature = OutcomeTable::from_outcomes([GameOutcome::Premature]);
        assert!(matches!(summarize(&only_premature), Err(ExperimentError::EmptyInput)));
    }

    #[test]
    fn premature_excluded_from_proportions() {
        let table = OutcomeTable::from_outcomes([
            GameOutcome::Win { player: Player::One, k: 3 },
            GameOutcome::Win { player: Player::Two, k: 4 },
            GameOutcome::Premature,
            GameOutcome::Premature,
        ]);
        assert_eq!(table.completed(), 2);
        assert_eq!(table.win_pct(Player::One), 50.0);
        let rows = summarize(&table).unwrap();
        assert_eq!(rows[2].p1_pct, Some(50.0));
        assert_eq!(rows[3].p2_pct, Some(50.0));
        assert_eq!(rows[6].p1_pct, Some(50.0));
        let total: f64 = rows[..5].iter().map(|r| r.p1_pct.unwrap() + r.p2_pct.unwrap()).sum();
        assert!((total - 100.0).abs() < 1e-12);
    }
}

//! Random-game, opening, end-game and tournament studies.
//!
//! Every game draws from its own substream of the master seed (see
//! [`crate::rng::substream`]), and results are aggregated in game-index
//! order, so the output depends only on the seed and the configuration.

mod classical;
mod deterministic;
mod endgames;
mod output;
mod random;
mod table;

use thiserror::Error;

pub use classical::{enumerate_classical, CLASSICAL_ORDERINGS};
pub use deterministic::{play_deterministic_game, run_deterministic};
pub use endgames::{
    blocking_effectiveness, blocking_outcome, harvest_endgames, BlockMode, BlockingCurve, CurveBin, EndGame,
    DEFAULT_BIN_WIDTH,
};
pub use output::{write_curves_csv, write_curves_json, write_tables_csv, write_tables_json, Format, TableReport};
pub use random::{play_random_game, run_random_games, GameMode};
pub use table::{summarize, GameOutcome, OutcomeTable, ReportRow};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("empty input: no completed games to summarize")]
    EmptyInput,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

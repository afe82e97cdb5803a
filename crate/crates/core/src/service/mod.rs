//! Live game sessions against the engine strategies, served as JSON over HTTP.
//!
//! The engine never moves on its own: the client asks for each engine move.
//! Engine randomness for move `n` is substream `n` of the session seed, so a
//! session replays identically.

mod http;
mod store;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{Amplitudes, BoardError, GameState, Illegality, Line, Move, Player, WeightReport, SITES};
use crate::optimizer::{ConstraintSet, DEFAULT_RESTARTS};
use crate::oracle::oracle_maximizing_weight;
use crate::rng::substream;
use crate::strategies::{opening_move, strategy_step, OpeningKind, StrategyPair};

pub use http::{router, serve};
pub use store::SessionStore;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ServiceError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("it is not the human's turn")]
    NotYourTurn,
    #[error("it is not the engine's turn")]
    NotEnginesTurn,
    #[error("the game is over")]
    GameOver,
    #[error("illegal move: {0}")]
    Illegal(Illegality),
    #[error("move has no component orthogonal to the previous moves (residual norm {norm:e})")]
    DegenerateResidual { norm: f64 },
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("session store: {0}")]
    Storage(String),
}

impl ServiceError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::InvalidConfig(_) => "invalid_config",
            ServiceError::UnknownSession(_) => "unknown_session",
            ServiceError::NotYourTurn => "not_your_turn",
            ServiceError::NotEnginesTurn => "not_engines_turn",
            ServiceError::GameOver => "game_over",
            ServiceError::Illegal(Illegality::NotNormalized { .. }) => "not_normalized",
            ServiceError::Illegal(Illegality::NotOrthogonal { .. }) => "not_orthogonal",
            ServiceError::DegenerateResidual { .. } => "degenerate_residual",
            ServiceError::InvalidMove(_) => "invalid_move",
            ServiceError::Storage(_) => "storage",
        }
    }
}

impl From<BoardError> for ServiceError {
    fn from(e: BoardError) -> Self {
        match e {
            BoardError::Illegal(i) => ServiceError::Illegal(i),
            BoardError::DegenerateResidual { norm } => ServiceError::DegenerateResidual { norm },
            BoardError::WrongTurn { .. } => ServiceError::NotYourTurn,
            BoardError::GameOver => ServiceError::GameOver,
            other => ServiceError::InvalidMove(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum Status {
    InProgress,
    Won { player: Player, k: usize },
    Draw,
    /// The engine could not find a move.
    Aborted { reason: AbortReason },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortReason {
    Premature,
}

impl Status {
    /// Status implied by the board alone; `last` is the player who just moved.
    fn after_move(state: &GameState, last: Player) -> Status {
        if state.is_win(last) {
            Status::Won { player: last, k: state.moves(last).len() }
        } else if state.is_full() {
            Status::Draw
        } else {
            Status::InProgress
        }
    }

    /// Status recomputed from a replayed history.
    fn of_state(state: &GameState) -> Status {
        let mut replay = GameState::new();
        for (player, mv) in state.history() {
            replay = replay.apply_move(player, mv).expect("history of a valid state replays");
            let status = Status::after_move(&replay, player);
            if status != Status::InProgress {
                return status;
            }
        }
        Status::InProgress
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    pub human_player: u8,
    pub strategy: String,
    pub opening: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub restarts: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub state: GameState,
    pub human_player: Player,
    pub strategy: StrategyPair,
    pub opening: OpeningKind,
    pub seed: u64,
    pub restarts: usize,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct HumanMove {
    pub amplitudes: Vec<f64>,
    #[serde(default)]
    pub assist: bool,
}

/// What the client sees of a session.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionView {
    pub id: String,
    pub human_player: Player,
    pub engine_player: Player,
    pub strategy: StrategyPair,
    pub opening: OpeningKind,
    pub seed: u64,
    pub restarts: usize,
    pub status: Status,
    pub to_move: Option<Player>,
    pub moves1: Vec<[f64; SITES]>,
    pub moves2: Vec<[f64; SITES]>,
    pub weights: PerPlayer<WeightReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerPlayer<T> {
    #[serde(rename = "1")]
    pub one: T,
    #[serde(rename = "2")]
    pub two: T,
}

impl<T> PerPlayer<T> {
    fn build(mut f: impl FnMut(Player) -> T) -> PerPlayer<T> {
        PerPlayer { one: f(Player::One), two: f(Player::Two) }
    }
}

/// Largest weight each line can reach with one more move, per the oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleLines {
    pub lines: std::collections::BTreeMap<String, f64>,
    pub best_line: Line,
    pub best_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub id: String,
    pub to_move: Option<Player>,
    pub weights: PerPlayer<WeightReport>,
    /// For both players as if each moved next; absent on a full board.
    pub oracle: Option<PerPlayer<OracleLines>>,
}

fn oracle_lines(state: &GameState, player: Player) -> OracleLines {
    let weights: Vec<(Line, f64)> = Line::ALL
        .iter()
        .map(|&line| (line, oracle_maximizing_weight(&ConstraintSet::from_state(state, player, line)).weight))
        .collect();
    let (best_line, best_weight) = weights
        .iter()
        .copied()
        .fold((Line::ALL[0], f64::NEG_INFINITY), |best, (l, w)| if w > best.1 { (l, w) } else { best });
    OracleLines { lines: weights.into_iter().map(|(l, w)| (l.name(), w)).collect(), best_line, best_weight }
}

impl Session {
    pub fn create(id: String, config: &SessionConfig) -> Result<Session, ServiceError> {
        let human_player = Player::from_number(config.human_player)
            .ok_or_else(|| ServiceError::InvalidConfig(format!("human_player must be 1 or 2, got {}", config.human_player)))?;
        let strategy: StrategyPair = config.strategy.parse().map_err(ServiceError::InvalidConfig)?;
        let opening: OpeningKind = config.opening.parse().map_err(ServiceError::InvalidConfig)?;
        let restarts = config.restarts.unwrap_or(DEFAULT_RESTARTS);
        if restarts == 0 {
            return Err(ServiceError::InvalidConfig("restarts must be at least 1".into()));
        }
        let mut session = Session {
            id,
            state: GameState::new(),
            human_player,
            strategy,
            opening,
            seed: config.seed.unwrap_or_else(rand::random),
            restarts,
            status: Status::InProgress,
        };
        if human_player == Player::Two {
            session.engine_move()?;
        }
        Ok(session)
    }

    pub fn engine_player(&self) -> Player {
        self.human_player.opponent()
    }

    fn require_turn(&self, player: Player, wrong: ServiceError) -> Result<(), ServiceError> {
        if self.status != Status::InProgress {
            return Err(ServiceError::GameOver);
        }
        if self.state.to_move() != Some(player) {
            return Err(wrong);
        }
        Ok(())
    }

    pub fn submit_human_move(&mut self, mv: &HumanMove) -> Result<(), ServiceError> {
        self.require_turn(self.human_player, ServiceError::NotYourTurn)?;
        let raw: [f64; SITES] = mv
            .amplitudes
            .as_slice()
            .try_into()
            .map_err(|_| ServiceError::InvalidMove(format!("expected {SITES} amplitudes, got {}", mv.amplitudes.len())))?;
        let raw = Amplitudes(raw);
        if !raw.is_finite() {
            return Err(ServiceError::InvalidMove("amplitudes must be finite".into()));
        }
        let candidate = if mv.assist {
            self.state.orthonormalize_against(&raw)?
        } else {
            self.state.validate_move(&raw).map_err(ServiceError::Illegal)?;
            Move::unit(raw).map_err(ServiceError::Illegal)?
        };
        self.play(self.human_player, &candidate)
    }

    pub fn engine_move(&mut self) -> Result<(), ServiceError> {
        let engine = self.engine_player();
        self.require_turn(engine, ServiceError::NotEnginesTurn)?;
        let mut rng = substream(self.seed, self.state.total_moves() as u64);
        let mv = if self.state.total_moves() == 0 {
            opening_move(self.opening, &mut rng)
        } else {
            match strategy_step(self.strategy, &self.state, engine, &mut rng, self.restarts) {
                Ok(mv) => mv,
                Err(e) => {
                    log::info!("session {}: engine gave up: {e}", self.id);
                    self.status = Status::Aborted { reason: AbortReason::Premature };
                    return Ok(());
                }
            }
        };
        self.play(engine, &mv)
    }

    fn play(&mut self, player: Player, mv: &Move) -> Result<(), ServiceError> {
        self.state = self.state.apply_move(player, mv)?;
        self.status = Status::after_move(&self.state, player);
        Ok(())
    }

    fn weights(&self) -> PerPlayer<WeightReport> {
        PerPlayer::build(|p| self.state.weight_report(p))
    }

    pub fn view(&self) -> SessionView {
        let raw = |p: Player| self.state.moves(p).iter().map(|m| m.amplitudes().0).collect();
        SessionView {
            id: self.id.clone(),
            human_player: self.human_player,
            engine_player: self.engine_player(),
            strategy: self.strategy,
            opening: self.opening,
            seed: self.seed,
            restarts: self.restarts,
            status: self.status,
            to_move: if self.status == Status::InProgress { self.state.to_move() } else { None },
            moves1: raw(Player::One),
            moves2: raw(Player::Two),
            weights: self.weights(),
        }
    }

    pub fn analysis(&self) -> Analysis {
        Analysis {
            id: self.id.clone(),
            to_move: self.state.to_move(),
            weights: self.weights(),
            oracle: (!self.state.is_full()).then(|| PerPlayer::build(|p| oracle_lines(&self.state, p))),
        }
    }

    /// Checks a session read back from storage.
    fn validated(mut self) -> Result<Session, ServiceError> {
        let replayed = GameState::replay(
            &self.state.moves(Player::One).iter().map(|m| m.amplitudes().0).collect::<Vec<_>>(),
            &self.state.moves(Player::Two).iter().map(|m| m.amplitudes().0).collect::<Vec<_>>(),
        )
        .map_err(|e| ServiceError::Storage(format!("session {}: {e}", self.id)))?;
        self.state = replayed;
        if !matches!(self.status, Status::Aborted { .. }) {
            self.status = Status::of_state(&self.state);
        }
        Ok(self)
    }
}

//! Board state, legality and the weight/win rules.
//!
//! A move is a real unit vector over the nine sites. Sites are numbered 1..=9
//! row-major; index `i` of an [`Amplitudes`] array holds site `i + 1`. A move is
//! legal when it is orthogonal to every move already played by either player,
//! and a player's weight along a line is the sum over the line's three sites of
//! the squared accumulated amplitude of that player's moves.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Number of sites on the board.
pub const SITES: usize = 9;
/// Maximum number of moves in a game.
pub const MAX_MOVES: usize = 9;
/// Norm and overlap tolerance for accepting a submitted move.
pub const LEGALITY_TOL: f64 = 1e-6;
/// Orthonormality maintained between stored moves.
pub const ORTHO_TOL: f64 = 1e-9;
/// A line weight at or above this value wins.
pub const WIN_THRESHOLD: f64 = 3.0 - 1e-9;
/// Residual norm below which a projection is considered to have vanished.
pub const DEGENERATE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoardError {
    #[error("illegal move: {0}")]
    Illegal(#[from] Illegality),
    #[error("candidate lies in the span of the previous moves (residual norm {norm:e})")]
    DegenerateResidual { norm: f64 },
    #[error("not {got}'s turn")]
    WrongTurn { to_move: Option<Player>, got: Player },
    #[error("the board is full")]
    GameOver,
    #[error("amplitudes must be finite")]
    NonFinite,
    #[error("malformed game state: {0}")]
    Malformed(String),
}

/// Why a candidate move was rejected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Illegality {
    #[error("not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("not orthogonal to move {index} (player {player}, overlap {overlap:e})")]
    NotOrthogonal {
        /// Position of the offending move in play order, starting at 0.
        index: usize,
        player: Player,
        overlap: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Player::One => 1,
            Player::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Player> {
        match n {
            1 => Some(Player::One),
            2 => Some(Player::Two),
            _ => None,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "player {}", self.number())
    }
}

impl Serialize for Player {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

impl<'de> Deserialize<'de> for Player {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let n = u8::deserialize(d)?;
        Player::from_number(n).ok_or_else(|| D::Error::custom(format!("player must be 1 or 2, got {n}")))
    }
}

/// Nine real amplitudes, one per site.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Amplitudes(pub [f64; SITES]);

impl Amplitudes {
    pub const ZERO: Amplitudes = Amplitudes([0.0; SITES]);

    /// Classical move on `site` (1-based).
    pub fn basis(site: usize) -> Amplitudes {
        assert!((1..=SITES).contains(&site), "site {site} out of range");
        let mut v = [0.0; SITES];
        v[site - 1] = 1.0;
        Amplitudes(v)
    }

    pub fn dot(&self, other: &Amplitudes) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `self - coeff * other`
    pub fn sub_scaled(&self, coeff: f64, other: &Amplitudes) -> Amplitudes {
        let mut out = *self;
        for (o, b) in out.0.iter_mut().zip(other.0.iter()) {
            *o -= coeff * b;
        }
        out
    }

    pub fn as_array(&self) -> &[f64; SITES] {
        &self.0
    }
}

impl Index<usize> for Amplitudes {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Amplitudes {
    type Output = Amplitudes;
    fn add(mut self, rhs: Amplitudes) -> Amplitudes {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

impl Sub for Amplitudes {
    type Output = Amplitudes;
    fn sub(mut self, rhs: Amplitudes) -> Amplitudes {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

impl Mul<f64> for Amplitudes {
    type Output = Amplitudes;
    fn mul(mut self, rhs: f64) -> Amplitudes {
        for a in self.0.iter_mut() {
            *a *= rhs;
        }
        self
    }
}

/// A unit-norm move.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Move(Amplitudes);

impl Move {
    /// Scales `a` to unit length.
    pub fn normalize(a: Amplitudes) -> Result<Move, BoardError> {
        if !a.is_finite() {
            return Err(BoardError::NonFinite);
        }
        let norm = a.norm();
        if norm < DEGENERATE_TOL {
            return Err(BoardError::DegenerateResidual { norm });
        }
        Ok(Move(a * (1.0 / norm)))
    }

    /// Accepts a vector already of unit length within [`LEGALITY_TOL`]; it is
    /// kept bit-for-bit when within [`ORTHO_TOL`] of unit length and rescaled
    /// otherwise.
    pub fn unit(a: Amplitudes) -> Result<Move, Illegality> {
        let norm = a.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > LEGALITY_TOL {
            return Err(Illegality::NotNormalized { norm });
        }
        if (norm - 1.0).abs() <= ORTHO_TOL {
            Ok(Move(a))
        } else {
            Ok(Move(a * (1.0 / norm)))
        }
    }

    pub fn classical(site: usize) -> Move {
        Move(Amplitudes::basis(site))
    }

    /// Equal amplitude 1/3 on every site.
    pub fn uniform() -> Move {
        Move(Amplitudes([1.0 / 3.0; SITES]))
    }

    pub fn amplitudes(&self) -> &Amplitudes {
        &self.0
    }

    pub fn negated(&self) -> Move {
        Move(self.0 * -1.0)
    }

    /// True if every amplitude but one is zero.
    pub fn is_classical(&self) -> bool {
        self.0 .0.iter().filter(|v| **v != 0.0).count() == 1
    }
}

impl From<Move> for Amplitudes {
    fn from(m: Move) -> Amplitudes {
        m.0
    }
}

/// One of the eight winning lines, in canonical order
/// 123, 456, 789, 147, 258, 369, 159, 357.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line(u8);

const LINE_SITES: [[usize; 3]; 8] = [
    [1, 2, 3],
    [4, 5, 6],
    [7, 8, 9],
    [1, 4, 7],
    [2, 5, 8],
    [3, 6, 9],
    [1, 5, 9],
    [3, 5, 7],
];

impl Line {
    pub const ALL: [Line; 8] = [
        Line(0),
        Line(1),
        Line(2),
        Line(3),
        Line(4),
        Line(5),
        Line(6),
        Line(7),
    ];

    pub fn from_index(i: usize) -> Option<Line> {
        (i < 8).then_some(Line(i as u8))
    }

    /// Position in the canonical order.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// 1-based site numbers.
    pub fn sites(self) -> [usize; 3] {
        LINE_SITES[self.index()]
    }

    /// 0-based array indices of the sites.
    pub fn site_indices(self) -> [usize; 3] {
        self.sites().map(|s| s - 1)
    }

    pub fn contains_index(self, i: usize) -> bool {
        self.site_indices().contains(&i)
    }

    pub fn name(self) -> String {
        self.sites().iter().map(|s| s.to_string()).collect()
    }

    /// Squared norm of the projection of `a` onto the line's three sites.
    pub fn projected_weight(self, a: &Amplitudes) -> f64 {
        self.site_indices().iter().map(|&i| a[i] * a[i]).sum()
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Line {
    type Err = String;
    fn from_str(s: &str) -> Result<Line, String> {
        Line::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| format!("unknown line {s:?}"))
    }
}

impl Serialize for Line {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl<'de> Deserialize<'de> for Line {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// All eight line weights of one player.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightReport {
    pub weights: [f64; 8],
    pub max_line: Line,
    pub max_weight: f64,
}

impl WeightReport {
    pub fn from_weights(weights: [f64; 8]) -> WeightReport {
        let mut max_line = Line::ALL[0];
        let mut max_weight = weights[0];
        for line in Line::ALL.into_iter().skip(1) {
            if weights[line.index()] > max_weight {
                max_weight = weights[line.index()];
                max_line = line;
            }
        }
        WeightReport { weights, max_line, max_weight }
    }

    pub fn weight(&self, line: Line) -> f64 {
        self.weights[line.index()]
    }
}

impl Serialize for WeightReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Lines<'a>(&'a [f64; 8]);
        impl Serialize for Lines<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(8))?;
                for line in Line::ALL {
                    map.serialize_entry(&line.name(), &self.0[line.index()])?;
                }
                map.end()
            }
        }
        let mut map = s.serialize_map(Some(3))?;
        map.serialize_entry("lines", &Lines(&self.weights))?;
        map.serialize_entry("max_line", &self.max_line)?;
        map.serialize_entry("max_weight", &self.max_weight)?;
        map.end()
    }
}

/// Move histories of both players with cached accumulated amplitudes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GameState {
    moves1: Vec<Move>,
    moves2: Vec<Move>,
    sum1: Amplitudes,
    sum2: Amplitudes,
}

impl GameState {
    pub fn new() -> GameState {
        GameState::default()
    }

    pub fn moves(&self, player: Player) -> &[Move] {
        match player {
            Player::One => &self.moves1,
            Player::Two => &self.moves2,
        }
    }

    /// Accumulated amplitude per site over the player's moves.
    pub fn sum(&self, player: Player) -> &Amplitudes {
        match player {
            Player::One => &self.sum1,
            Player::Two => &self.sum2,
        }
    }

    pub fn total_moves(&self) -> usize {
        self.moves1.len() + self.moves2.len()
    }

    pub fn is_full(&self) -> bool {
        self.total_moves() >= MAX_MOVES
    }

    /// Player whose turn it is, or `None` once all nine moves are played.
    pub fn to_move(&self) -> Option<Player> {
        if self.is_full() {
            None
        } else if self.moves1.len() == self.moves2.len() {
            Some(Player::One)
        } else {
            Some(Player::Two)
        }
    }

    /// All moves in play order: P1, P2, P1, ...
    pub fn history(&self) -> impl Iterator<Item = (Player, &Move)> + '_ {
        (0..self.total_moves()).map(move |i| {
            if i % 2 == 0 {
                (Player::One, &self.moves1[i / 2])
            } else {
                (Player::Two, &self.moves2[i / 2])
            }
        })
    }

    pub fn line_weight(&self, player: Player, line: Line) -> f64 {
        line.projected_weight(self.sum(player))
    }

    pub fn weight_report(&self, player: Player) -> WeightReport {
        let sum = self.sum(player);
        WeightReport::from_weights(Line::ALL.map(|l| l.projected_weight(sum)))
    }

    pub fn is_win(&self, player: Player) -> bool {
        self.weight_report(player).max_weight >= WIN_THRESHOLD
    }

    /// Checks the norm and the overlap with every previous move.
    pub fn validate_move(&self, candidate: &Amplitudes) -> Result<(), Illegality> {
        let norm = candidate.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > LEGALITY_TOL {
            return Err(Illegality::NotNormalized { norm });
        }
        for (index, (player, prev)) in self.history().enumerate() {
            let overlap = prev.amplitudes().dot(candidate);
            if overlap.abs() > LEGALITY_TOL {
                return Err(Illegality::NotOrthogonal { index, player, overlap });
            }
        }
        Ok(())
    }

    /// Gram-Schmidt: removes the components along every previous move and
    /// normalizes what is left.
    pub fn orthonormalize_against(&self, candidate: &Amplitudes) -> Result<Move, BoardError> {
        if !candidate.is_finite() {
            return Err(BoardError::NonFinite);
        }
        let mut residual = self.project_out(candidate);
        let norm = residual.norm();
        if norm < DEGENERATE_TOL {
            return Err(BoardError::DegenerateResidual { norm });
        }
        // second pass restores orthogonality lost to cancellation
        residual = self.project_out(&residual);
        Move::normalize(residual)
    }

    fn is_orthonormal_extension(&self, v: &Amplitudes) -> bool {
        (v.norm() - 1.0).abs() <= ORTHO_TOL
            && self.history().all(|(_, prev)| prev.amplitudes().dot(v).abs() <= ORTHO_TOL)
    }

    fn project_out(&self, v: &Amplitudes) -> Amplitudes {
        self.history()
            .fold(*v, |acc, (_, prev)| acc.sub_scaled(prev.amplitudes().dot(&acc), prev.amplitudes()))
    }

    /// Appends a legal move for `player` and returns the new state.
    ///
    /// The stored move is re-orthonormalized against the history, so moves
    /// accepted within [`LEGALITY_TOL`] are kept orthonormal to [`ORTHO_TOL`].
    pub fn apply_move(&self, player: Player, mv: &Move) -> Result<GameState, BoardError> {
        let to_move = self.to_move();
        if to_move != Some(player) {
            return Err(BoardError::WrongTurn { to_move, got: player });
        }
        self.validate_move(mv.amplitudes())?;
        let clean = if self.is_orthonormal_extension(mv.amplitudes()) {
            *mv
        } else {
            self.orthonormalize_against(mv.amplitudes())?
        };
        let mut next = self.clone();
        match player {
            Player::One => {
                next.moves1.push(clean);
                next.sum1 = next.sum1 + *clean.amplitudes();
            }
            Player::Two => {
                next.moves2.push(clean);
                next.sum2 = next.sum2 + *clean.amplitudes();
            }
        }
        Ok(next)
    }

    /// A random legal move: an isotropic Gaussian vector orthonormalized
    /// against the history.
    pub fn random_move<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Move, BoardError> {
        if self.is_full() {
            return Err(BoardError::GameOver);
        }
        loop {
            let mut g = [0.0; SITES];
            for v in g.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            match self.orthonormalize_against(&Amplitudes(g)) {
                Ok(m) => return Ok(m),
                Err(BoardError::DegenerateResidual { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("game state serializes")
    }

    /// Parses and replays canonical JSON; illegal histories report the
    /// offending move rather than a parse error.
    pub fn from_json(s: &str) -> Result<GameState, BoardError> {
        let raw: RawState = serde_json::from_str(s).map_err(|e| BoardError::Malformed(e.to_string()))?;
        GameState::replay(&raw.moves1, &raw.moves2)
    }
}

#[derive(Serialize, Deserialize)]
struct RawState {
    moves1: Vec<[f64; SITES]>,
    moves2: Vec<[f64; SITES]>,
}

impl Serialize for GameState {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawState {
            moves1: self.moves1.iter().map(|m| m.amplitudes().0).collect(),
            moves2: self.moves2.iter().map(|m| m.amplitudes().0).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GameState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawState::deserialize(d)?;
        GameState::replay(&raw.moves1, &raw.moves2).map_err(D::Error::custom)
    }
}

impl GameState {
    /// Rebuilds a state by replaying both histories in alternating order.
    pub fn replay(moves1: &[[f64; SITES]], moves2: &[[f64; SITES]]) -> Result<GameState, BoardError> {
        if moves2.len() > moves1.len() || moves1.len() > moves2.len() + 1 {
            return Err(BoardError::Malformed(format!(
                "move counts {} and {} do not alternate",
                moves1.len(),
                moves2.len()
            )));
        }
        let mut state = GameState::new();
        for i in 0..moves1.len() {
            for (player, list) in [(Player::One, moves1), (Player::Two, moves2)] {
                if let Some(a) = list.get(i) {
                    let mv = Move::unit(Amplitudes(*a))?;
                    state = state.apply_move(player, &mv)?;
                }
            }
        }
        Ok(state)
    }
}

//! Quantum tic-tac-toe.
//!
//! Moves are real unit vectors over the nine sites, each orthogonal to every
//! move played before it; a player wins once the squared accumulated
//! amplitudes along one of the eight lines sum to three. The crate provides
//! the board rules, a Lagrange-Newton solver for weight-maximizing moves with
//! an independent closed-form oracle, the opening/offensive/blocking
//! strategies, the experiment harnesses, an HTTP session service and a CLI.

#[macro_use]
mod macros;

pub mod board;
pub mod experiments;
pub mod optimizer;
pub mod oracle;
pub mod rng;
pub mod service;
pub mod strategies;

pub use board::{Amplitudes, BoardError, GameState, Illegality, Line, Move, Player, WeightReport};
pub use optimizer::{ConstraintSet, OptimizerError, StationarySolution};
pub use oracle::{oracle_maximizing_weight, OracleSolution};

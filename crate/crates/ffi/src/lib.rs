//! C ABI for the quantum tic-tac-toe engine.
//!
//! Games are opaque `QtttGame` handles created by `qttt_game_new` or
//! `qttt_game_from_json` and released with `qttt_game_free`. Every fallible
//! function returns a `QtttStatus`; on failure `qttt_last_error` describes
//! the problem. Strings returned by the library are released with
//! `qttt_string_free`. Players are numbered 1 and 2, lines 0 to 7 in the
//! order 123, 456, 789, 147, 258, 369, 159, 357.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qttt::board::{Amplitudes, BoardError, GameState, Illegality, Line, Move, Player, SITES};
use qttt::optimizer::ConstraintSet;
use qttt::oracle::oracle_maximizing_weight;
use qttt::rng::substream;
use qttt::strategies::{opening_move, strategy_step, OpeningKind, StrategyError, StrategyPair};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QtttStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotNormalized = 3,
    NotOrthogonal = 4,
    DegenerateResidual = 5,
    WrongTurn = 6,
    GameOver = 7,
    NotFound = 8,
    ParseError = 9,
    Panic = 10,
}

/// Opaque game handle.
pub struct QtttGame {
    state: GameState,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: QtttStatus, msg: impl Into<String>) -> QtttStatus {
    set_error(msg);
    status
}

fn board_status(e: &BoardError) -> QtttStatus {
    match e {
        BoardError::Illegal(Illegality::NotNormalized { .. }) => QtttStatus::NotNormalized,
        BoardError::Illegal(Illegality::NotOrthogonal { .. }) => QtttStatus::NotOrthogonal,
        BoardError::DegenerateResidual { .. } => QtttStatus::DegenerateResidual,
        BoardError::WrongTurn { .. } => QtttStatus::WrongTurn,
        BoardError::GameOver => QtttStatus::GameOver,
        BoardError::NonFinite | BoardError::Malformed(_) => QtttStatus::InvalidArgument,
    }
}

fn board_fail(e: BoardError) -> QtttStatus {
    fail(board_status(&e), e.to_string())
}

/// Runs `f`, turning a panic into `QtttStatus::Panic`.
fn guarded(f: impl FnOnce() -> QtttStatus) -> QtttStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(QtttStatus::Panic, "internal error (panic)"),
    }
}

fn player(n: i32) -> Result<Player, QtttStatus> {
    u8::try_from(n)
        .ok()
        .and_then(Player::from_number)
        .ok_or_else(|| fail(QtttStatus::InvalidArgument, format!("player must be 1 or 2, got {n}")))
}

fn line(index: i32) -> Result<Line, QtttStatus> {
    usize::try_from(index)
        .ok()
        .and_then(Line::from_index)
        .ok_or_else(|| fail(QtttStatus::InvalidArgument, format!("line index must be 0..7, got {index}")))
}

unsafe fn read_amplitudes(p: *const f64) -> Result<Amplitudes, QtttStatus> {
    if p.is_null() {
        return Err(fail(QtttStatus::NullPointer, "amplitudes pointer is null"));
    }
    let mut a = [0.0; SITES];
    a.copy_from_slice(std::slice::from_raw_parts(p, SITES));
    Ok(Amplitudes(a))
}

unsafe fn write_amplitudes(out: *mut f64, mv: &Move) {
    if !out.is_null() {
        std::slice::from_raw_parts_mut(out, SITES).copy_from_slice(&mv.amplitudes().0);
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, QtttStatus> {
    if p.is_null() {
        return Err(fail(QtttStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(QtttStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

macro_rules! game_ref {
    ($p:expr) => {
        match $p.as_ref() {
            Some(g) => g,
            None => return fail(QtttStatus::NullPointer, "game handle is null"),
        }
    };
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qttt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// New empty game. Never returns NULL.
#[no_mangle]
pub extern "C" fn qttt_game_new() -> *mut QtttGame {
    Box::into_raw(Box::new(QtttGame { state: GameState::new() }))
}

/// Releases a game handle. NULL is ignored.
///
/// # Safety
/// `game` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qttt_game_free(game: *mut QtttGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Player to move (1 or 2), or 0 once nine moves are on the board.
///
/// # Safety
/// `game` must be a valid handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn qttt_game_to_move(game: *const QtttGame) -> i32 {
    game.as_ref().and_then(|g| g.state.to_move()).map_or(0, |p| i32::from(p.number()))
}

/// Number of moves played so far.
///
/// # Safety
/// `game` must be a valid handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn qttt_game_total_moves(game: *const QtttGame) -> usize {
    game.as_ref().map_or(0, |g| g.state.total_moves())
}

/// Plays `amplitudes` (9 values) for `player` if it is a legal move: unit
/// length and orthogonal to every previous move.
///
/// # Safety
/// `game` must be a valid handle; `amplitudes` must point to 9 doubles.
#[no_mangle]
pub unsafe extern "C" fn qttt_game_apply(game: *mut QtttGame, player: i32, amplitudes: *const f64) -> QtttStatus {
    guarded(|| {
        let g = match game.as_mut() {
            Some(g) => g,
            None => return fail(QtttStatus::NullPointer, "game handle is null"),
        };
        let p = try_status!(self::player(player));
        let a = try_status!(read_amplitudes(amplitudes));
        if !a.is_finite() {
            return fail(QtttStatus::InvalidArgument, "amplitudes must be finite");
        }
        let mv = match Move::unit(a) {
            Ok(mv) => mv,
            Err(e) => return board_fail(BoardError::Illegal(e)),
        };
        match g.state.apply_move(p, &mv) {
            Ok(next) => {
                g.state = next;
                QtttStatus::Ok
            }
            Err(e) => board_fail(e),
        }
    })
}

/// Like `qttt_game_apply`, but first projects `amplitudes` onto the
/// complement of the previous moves and normalizes it. The move actually
/// played is written to `out_move` (9 doubles) unless it is NULL.
///
/// # Safety
/// `game` must be a valid handle; `amplitudes` must point to 9 doubles;
/// `out_move` must be NULL or point to 9 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qttt_game_apply_assisted(
    game: *mut QtttGame,
    player: i32,
    amplitudes: *const f64,
    out_move: *mut f64,
) -> QtttStatus {
    guarded(|| {
        let g = match game.as_mut() {
            Some(g) => g,
            None => return fail(QtttStatus::NullPointer, "game handle is null"),
        };
        let p = try_status!(self::player(player));
        let a = try_status!(read_amplitudes(amplitudes));
        if !a.is_finite() {
            return fail(QtttStatus::InvalidArgument, "amplitudes must be finite");
        }
        let mv = match g.state.orthonormalize_against(&a) {
            Ok(mv) => mv,
            Err(e) => return board_fail(e),
        };
        match g.state.apply_move(p, &mv) {
            Ok(next) => {
                g.state = next;
                write_amplitudes(out_move, &mv);
                QtttStatus::Ok
            }
            Err(e) => board_fail(e),
        }
    })
}

/// Weight of `player` along line `line` (0..7).
///
/// # Safety
/// `game` must be a valid handle; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn qttt_game_line_weight(game: *const QtttGame, player: i32, line: i32, out: *mut f64) -> QtttStatus {
    guarded(|| {
        let g = game_ref!(game);
        let p = try_status!(self::player(player));
        let l = try_status!(self::line(line));
        if out.is_null() {
            return fail(QtttStatus::NullPointer, "out is null");
        }
        *out = g.state.line_weight(p, l);
        QtttStatus::Ok
    })
}

/// Largest weight of `player` over the eight lines and the line attaining it
/// (earliest line on ties). Either output may be NULL.
///
/// # Safety
/// `game` must be a valid handle; outputs must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn qttt_game_max_weight(
    game: *const QtttGame,
    player: i32,
    out_weight: *mut f64,
    out_line: *mut i32,
) -> QtttStatus {
    guarded(|| {
        let g = game_ref!(game);
        let p = try_status!(self::player(player));
        let report = g.state.weight_report(p);
        if !out_weight.is_null() {
            *out_weight = report.max_weight;
        }
        if !out_line.is_null() {
            *out_line = report.max_line.index() as i32;
        }
        QtttStatus::Ok
    })
}

/// Whether `player` has a line of weight 3.
///
/// # Safety
/// `game` must be a valid handle; `out` must point to a writable bool.
#[no_mangle]
pub unsafe extern "C" fn qttt_game_is_win(game: *const QtttGame, player: i32, out: *mut bool) -> QtttStatus {
    guarded(|| {
        let g = game_ref!(game);
        let p = try_status!(self::player(player));
        if out.is_null() {
            return fail(QtttStatus::NullPointer, "out is null");
        }
        *out = g.state.is_win(p);
        QtttStatus::Ok
    })
}

/// Largest weight the player can reach along `line` with one more legal move,
/// computed in closed form, and the move reaching it (`out_move` may be NULL).
///
/// # Safety
/// `game` must be a valid handle; `out_weight` must be writable; `out_move`
/// must be NULL or point to 9 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qttt_game_oracle_max_weight(
    game: *const QtttGame,
    player: i32,
    line: i32,
    out_weight: *mut f64,
    out_move: *mut f64,
) -> QtttStatus {
    guarded(|| {
        let g = game_ref!(game);
        let p = try_status!(self::player(player));
        let l = try_status!(self::line(line));
        if out_weight.is_null() {
            return fail(QtttStatus::NullPointer, "out_weight is null");
        }
        if g.state.is_full() {
            return fail(QtttStatus::GameOver, "no legal move is left");
        }
        let sol = oracle_maximizing_weight(&ConstraintSet::from_state(&g.state, p, l));
        *out_weight = sol.weight;
        write_amplitudes(out_move, &sol.x);
        QtttStatus::Ok
    })
}

/// Computes and plays the engine's move for the player to move: `opening`
/// ("classical", "uniform", "random") on an empty board, otherwise the move
/// of `strategy` ("wb", "wbb", "wwb", "wbwb"). Randomness comes from `seed`
/// and the move number. The move is written to `out_move` unless NULL.
/// Returns `NotFound` when the strategy cannot produce a move.
///
/// # Safety
/// `game` must be a valid handle; strings must be NUL-terminated; `out_move`
/// must be NULL or point to 9 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qttt_game_engine_move(
    game: *mut QtttGame,
    strategy: *const c_char,
    opening: *const c_char,
    seed: u64,
    restarts: usize,
    out_move: *mut f64,
) -> QtttStatus {
    guarded(|| {
        let g = match game.as_mut() {
            Some(g) => g,
            None => return fail(QtttStatus::NullPointer, "game handle is null"),
        };
        let pair: StrategyPair = match try_status!(read_str(strategy, "strategy")).parse() {
            Ok(p) => p,
            Err(e) => return fail(QtttStatus::InvalidArgument, e),
        };
        let opening: OpeningKind = match try_status!(read_str(opening, "opening")).parse() {
            Ok(o) => o,
            Err(e) => return fail(QtttStatus::InvalidArgument, e),
        };
        if restarts == 0 {
            return fail(QtttStatus::InvalidArgument, "restarts must be at least 1");
        }
        let Some(p) = g.state.to_move() else {
            return fail(QtttStatus::GameOver, "no legal move is left");
        };
        let mut rng = substream(seed, g.state.total_moves() as u64);
        let mv = if g.state.total_moves() == 0 {
            opening_move(opening, &mut rng)
        } else {
            match strategy_step(pair, &g.state, p, &mut rng, restarts) {
                Ok(mv) => mv,
                Err(StrategyError::Board(e)) => return board_fail(e),
                Err(e) => return fail(QtttStatus::NotFound, e.to_string()),
            }
        };
        match g.state.apply_move(p, &mv) {
            Ok(next) => {
                g.state = next;
                write_amplitudes(out_move, &mv);
                QtttStatus::Ok
            }
            Err(e) => board_fail(e),
        }
    })
}

/// Canonical JSON `{"moves1": [...], "moves2": [...]}`; release with
/// `qttt_string_free`. NULL on failure.
///
/// # Safety
/// `game` must be a valid handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn qttt_game_to_json(game: *const QtttGame) -> *mut c_char {
    let Some(g) = game.as_ref() else {
        set_error("game handle is null");
        return ptr::null_mut();
    };
    match catch_unwind(AssertUnwindSafe(|| g.state.to_json())) {
        Ok(json) => CString::new(json).map_or(ptr::null_mut(), CString::into_raw),
        Err(_) => {
            set_error("internal error (panic)");
            ptr::null_mut()
        }
    }
}

/// Rebuilds a game from `qttt_game_to_json` output, replaying and checking
/// every move. On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must point to a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qttt_game_from_json(json: *const c_char, out: *mut *mut QtttGame) -> QtttStatus {
    guarded(|| {
        if out.is_null() {
            return fail(QtttStatus::NullPointer, "out is null");
        }
        let text = try_status!(read_str(json, "json"));
        match GameState::from_json(text) {
            Ok(state) => {
                *out = Box::into_raw(Box::new(QtttGame { state }));
                QtttStatus::Ok
            }
            Err(e @ BoardError::Malformed(_)) => fail(QtttStatus::ParseError, e.to_string()),
            Err(e) => board_fail(e),
        }
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qttt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

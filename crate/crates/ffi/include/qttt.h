#ifndef QTTT_H
#define QTTT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of every fallible call.
typedef enum QtttStatus {
  QTTT_STATUS_OK = 0,
  QTTT_STATUS_NULL_POINTER = 1,
  QTTT_STATUS_INVALID_ARGUMENT = 2,
  QTTT_STATUS_NOT_NORMALIZED = 3,
  QTTT_STATUS_NOT_ORTHOGONAL = 4,
  QTTT_STATUS_DEGENERATE_RESIDUAL = 5,
  QTTT_STATUS_WRONG_TURN = 6,
  QTTT_STATUS_GAME_OVER = 7,
  QTTT_STATUS_NOT_FOUND = 8,
  QTTT_STATUS_PARSE_ERROR = 9,
  QTTT_STATUS_PANIC = 10,
} QtttStatus;

// Opaque game handle.
typedef struct QtttGame QtttGame;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *qttt_last_error(void);

// New empty game. Never returns NULL.
struct QtttGame *qttt_game_new(void);

// Releases a game handle. NULL is ignored.
//
// # Safety
// `game` must come from this library and not be used afterwards.
void qttt_game_free(struct QtttGame *game);

// Player to move (1 or 2), or 0 once nine moves are on the board.
//
// # Safety
// `game` must be a valid handle or NULL.
int32_t qttt_game_to_move(const struct QtttGame *game);

// Number of moves played so far.
//
// # Safety
// `game` must be a valid handle or NULL.
size_t qttt_game_total_moves(const struct QtttGame *game);

// Plays `amplitudes` (9 values) for `player` if it is a legal move: unit
// length and orthogonal to every previous move.
//
// # Safety
// `game` must be a valid handle; `amplitudes` must point to 9 doubles.
enum QtttStatus qttt_game_apply(struct QtttGame *game, int32_t player, const double *amplitudes);

// Like `qttt_game_apply`, but first projects `amplitudes` onto the
// complement of the previous moves and normalizes it. The move actually
// played is written to `out_move` (9 doubles) unless it is NULL.
//
// # Safety
// `game` must be a valid handle; `amplitudes` must point to 9 doubles;
// `out_move` must be NULL or point to 9 writable doubles.
enum QtttStatus qttt_game_apply_assisted(struct QtttGame *game,
                                         int32_t player,
                                         const double *amplitudes,
                                         double *out_move);

// Weight of `player` along line `line` (0..7).
//
// # Safety
// `game` must be a valid handle; `out` must point to a writable double.
enum QtttStatus qttt_game_line_weight(const struct QtttGame *game,
                                      int32_t player,
                                      int32_t line,
                                      double *out);

// Largest weight of `player` over the eight lines and the line attaining it
// (earliest line on ties). Either output may be NULL.
//
// # Safety
// `game` must be a valid handle; outputs must be NULL or writable.
enum QtttStatus qttt_game_max_weight(const struct QtttGame *game,
                                     int32_t player,
                                     double *out_weight,
                                     int32_t *out_line);

// Whether `player` has a line of weight 3.
//
// # Safety
// `game` must be a valid handle; `out` must point to a writable bool.
enum QtttStatus qttt_game_is_win(const struct QtttGame *game, int32_t player, bool *out);

// Largest weight the player can reach along `line` with one more legal move,
// computed in closed form, and the move reaching it (`out_move` may be NULL).
//
// # Safety
// `game` must be a valid handle; `out_weight` must be writable; `out_move`
// must be NULL or point to 9 writable doubles.
enum QtttStatus qttt_game_oracle_max_weight(const struct QtttGame *game,
                                            int32_t player,
                                            int32_t line,
                                            double *out_weight,
                                            double *out_move);

// Computes and plays the engine's move for the player to move: `opening`
// ("classical", "uniform", "random") on an empty board, otherwise the move
// of `strategy` ("wb", "wbb", "wwb", "wbwb"). Randomness comes from `seed`
// and the move number. The move is written to `out_move` unless NULL.
// Returns `NotFound` when the strategy cannot produce a move.
//
// # Safety
// `game` must be a valid handle; strings must be NUL-terminated; `out_move`
// must be NULL or point to 9 writable doubles.
enum QtttStatus qttt_game_engine_move(struct QtttGame *game,
                                      const char *strategy,
                                      const char *opening,
                                      uint64_t seed,
                                      size_t restarts,
                                      double *out_move);

// Canonical JSON `{"moves1": [...], "moves2": [...]}`; release with
// `qttt_string_free`. NULL on failure.
//
// # Safety
// `game` must be a valid handle or NULL.
char *qttt_game_to_json(const struct QtttGame *game);

// Rebuilds a game from `qttt_game_to_json` output, replaying and checking
// every move. On success `*out` owns a new handle.
//
// # Safety
// `json` must be NUL-terminated; `out` must point to a writable pointer.
enum QtttStatus qttt_game_from_json(const char *json, struct QtttGame **out);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void qttt_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QTTT_H */

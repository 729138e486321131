#ifndef AGENTGAME_H
#define AGENTGAME_H

#include <stdbool.h>
#include <stddef.h>

// Result codes shared by every entry point.
typedef enum AgStatus {
  AG_STATUS_OK = 0,
  AG_STATUS_NULL_POINTER = 1,
  AG_STATUS_INVALID_ARGUMENT = 2,
  AG_STATUS_SIZE_LIMIT = 3,
  AG_STATUS_NOT_CONVERGED = 4,
  AG_STATUS_INFEASIBLE_RESOLUTION = 5,
  AG_STATUS_DEGENERATE_LIKELIHOOD = 6,
  AG_STATUS_CONFIG_ERROR = 7,
  AG_STATUS_IO_ERROR = 8,
  AG_STATUS_PANIC = 9,
} AgStatus;

// Opaque normal-form game.
typedef struct AgGame AgGame;

// Result of [`ag_solve_zero_sum`].
typedef struct AgZeroSumResult {
  double value;
  double lower;
  double upper;
  size_t iterations;
} AgZeroSumResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or null. The pointer
// stays valid until the next call into this library on the same thread.
const char *ag_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *ag_version(void);

// Create a game from `num_players` action counts and a row-major payoff
// tensor of `num_profiles * num_players` entries.
//
// # Safety
// `action_counts` must be valid for `num_players` reads, `payoffs` for
// `payoffs_len` reads and `out` for one write.
enum AgStatus ag_game_new(size_t num_players,
                          const size_t *action_counts,
                          const double *payoffs,
                          size_t payoffs_len,
                          struct AgGame **out);

// Release a game handle. Null is ignored.
//
// # Safety
// `game` must be null or a handle from [`ag_game_new`] not yet freed.
void ag_game_free(struct AgGame *game);

// Number of players, or 0 for a null handle.
//
// # Safety
// `game` must be null or a live handle.
size_t ag_game_num_players(const struct AgGame *game);

// Expected payoff of `player` under a mixed profile given as the
// concatenation of every player's probability vector.
//
// # Safety
// `game` must be a live handle, `strategies` valid for `strategies_len`
// reads and `out` for one write.
enum AgStatus ag_expected_utility(const struct AgGame *game,
                                  const double *strategies,
                                  size_t strategies_len,
                                  size_t player,
                                  double *out);

// Pure best response of `player` (lowest index on ties) and its value.
//
// # Safety
// As for [`ag_expected_utility`]; `out_action` and `out_value` must be valid
// for one write each.
enum AgStatus ag_best_response(const struct AgGame *game,
                               const double *strategies,
                               size_t strategies_len,
                               size_t player,
                               size_t *out_action,
                               double *out_value);

// Whether no player can gain more than `epsilon` by deviating.
//
// # Safety
// As for [`ag_expected_utility`].
enum AgStatus ag_is_epsilon_nash(const struct AgGame *game,
                                 const double *strategies,
                                 size_t strategies_len,
                                 double epsilon,
                                 bool *out);

// Solve a zero-sum matrix game (row player maximizes) by fictitious play.
// `matrix` is row-major. On success the strategies are written to
// `out_row` (`rows` entries) and `out_col` (`cols` entries). On
// `AG_STATUS_NOT_CONVERGED` only `out` is written and carries the bounds
// reached.
//
// # Safety
// `matrix` must be valid for `rows * cols` reads, `out` for one write and
// the strategy buffers for their lengths.
enum AgStatus ag_solve_zero_sum(size_t rows,
                                size_t cols,
                                const double *matrix,
                                double tol,
                                size_t max_iter,
                                struct AgZeroSumResult *out,
                                double *out_row,
                                double *out_col);

// Posterior probability of an adversarial user after one signal.
//
// # Safety
// `out` must be valid for one write.
enum AgStatus ag_bayes_update(double beta,
                              bool suspicious,
                              double q_adv,
                              double q_leg,
                              double *out);

// Shapley value of an `n`-agent game given by `values[mask]` for every
// subset bitmask (bit `i` is agent `i`). Writes `n` entries to `out`.
//
// # Safety
// `values` must be valid for `2^n` reads and `out` for `n` writes.
enum AgStatus ag_shapley(size_t n, const double *values, double *out);

// Load the scenario file at `config_path` and run it, writing outputs to
// `out_dir` (or the scenario's own output directory when null).
//
// # Safety
// `config_path` must be a NUL-terminated string; `out_dir` must be null or
// NUL-terminated.
enum AgStatus ag_run_config(const char *config_path, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AGENTGAME_H */

#ifndef TOKENPRUNE_H
#define TOKENPRUNE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum TpStatus {
  TP_STATUS_OK = 0,
  // A required pointer argument was null.
  TP_STATUS_NULL_POINTER = 1,
  // Invalid configuration or malformed config JSON.
  TP_STATUS_INVALID_CONFIG = 2,
  // Malformed input data such as wrong buffer lengths or channel counts.
  TP_STATUS_INVALID_INPUT = 3,
  // The inputs are well-formed but the request cannot be met, for
  // example a history budget smaller than the frame count.
  TP_STATUS_DOMAIN = 4,
  // An index argument was out of range.
  TP_STATUS_OUT_OF_RANGE = 5,
  // Internal panic; the library state is unchanged.
  TP_STATUS_PANIC = 6,
} TpStatus;

// Stratum of a token in a selection.
typedef enum TpStratum {
  TP_STRATUM_PRUNED = 0,
  TP_STRATUM_FOREGROUND = 1,
  TP_STRATUM_BACKGROUND = 2,
  TP_STRATUM_UNIFORM = 3,
} TpStratum;

// Opaque configuration handle.
typedef struct TpConfig TpConfig;

// Opaque history plan handle.
typedef struct TpPlan TpPlan;

// Opaque current-frame selection handle.
typedef struct TpSelection TpSelection;

// One history frame of a plan.
typedef struct TpFramePlan {
  size_t lag;
  size_t original_tokens;
  size_t quota;
  size_t realized_tokens;
  double scale;
  uint32_t target_width;
  uint32_t target_height;
} TpFramePlan;

// Per-stratum budgets of a current frame.
typedef struct TpStratumBudget {
  size_t k_total;
  size_t k_fg;
  size_t k_bg;
  size_t k_res;
} TpStratumBudget;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *tp_version(void);

// Message for the last failed call on this thread, empty after a success.
// The pointer stays valid until the next call into the library on the same
// thread.
const char *tp_last_error_message(void);

// Releases a string returned by the library.
//
// # Safety
// `s` must be null or a pointer obtained from this library that has not
// been freed.
void tp_string_free(char *s);

// A configuration holding the defaults.
struct TpConfig *tp_config_new_default(void);

// Parses a JSON configuration; fields it omits keep their defaults.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer to
// writable storage for one handle.
enum TpStatus tp_config_from_json(const char *json, struct TpConfig **out);

// Sets the four retention ratios. The handle is left unchanged if the new
// values are invalid.
//
// # Safety
// `config` must be a live handle from this library.
enum TpStatus tp_config_set_ratios(struct TpConfig *config,
                                   double lambda,
                                   double gamma,
                                   double mu,
                                   double rho);

// Sets the history window length.
//
// # Safety
// `config` must be a live handle from this library.
enum TpStatus tp_config_set_history_len(struct TpConfig *config, size_t history_len);

// The configuration as JSON; release it with [`tp_string_free`].
//
// # Safety
// `config` must be a live handle from this library.
char *tp_config_to_json(const struct TpConfig *config);

// # Safety
// `config` must be null or a live handle from this library; it is invalid
// afterwards.
void tp_config_free(struct TpConfig *config);

// Plans the resizing of `frames` history frames, lag 1 first.
//
// # Safety
// `widths` and `heights` must each point to `frames` values, `config` must
// be a live handle and `out` writable storage for one handle.
enum TpStatus tp_plan_history(const struct TpConfig *config,
                              const uint32_t *widths,
                              const uint32_t *heights,
                              size_t frames,
                              struct TpPlan **out);

// Total history budget of a plan; 0 for a null handle.
//
// # Safety
// `plan` must be null or a live handle from this library.
size_t tp_plan_budget(const struct TpPlan *plan);

// Number of frames in a plan; 0 for a null handle.
//
// # Safety
// `plan` must be null or a live handle from this library.
size_t tp_plan_frame_count(const struct TpPlan *plan);

// Copies frame `index` (0 for lag 1) of a plan into `out`.
//
// # Safety
// `plan` must be a live handle and `out` writable.
enum TpStatus tp_plan_frame(const struct TpPlan *plan, size_t index, struct TpFramePlan *out);

// The plan as JSON; release it with [`tp_string_free`].
//
// # Safety
// `plan` must be a live handle from this library.
char *tp_plan_to_json(const struct TpPlan *plan);

// # Safety
// `plan` must be null or a live handle from this library; it is invalid
// afterwards.
void tp_plan_free(struct TpPlan *plan);

// Per-stratum budgets for a frame of `n_total` tokens, `n_fg` foreground.
//
// # Safety
// `out` must be writable.
enum TpStatus tp_stratum_budgets(size_t n_total,
                                 size_t n_fg,
                                 double mu,
                                 double rho,
                                 struct TpStratumBudget *out);

// Foreground partition of an 8-bit image with 1 (gray) or 3 (RGB)
// interleaved channels. Writes one byte per token (1 foreground, 0
// background) in row-major order into `mask` and the grid shape into
// `rows` and `cols`. With `mask_len` too small nothing is written to `mask`
// and [`TpStatus::OutOfRange`] is returned, `rows` and `cols` still set.
//
// # Safety
// `pixels` must point to `width * height * channels` bytes, `mask` to
// `mask_len` writable bytes, and `rows`, `cols` must be writable.
enum TpStatus tp_partition(const struct TpConfig *config,
                           const uint8_t *pixels,
                           uint32_t width,
                           uint32_t height,
                           uint8_t channels,
                           uint8_t *mask,
                           size_t mask_len,
                           size_t *rows,
                           size_t *cols);

// Prunes a `rows × cols` frame under the config's `mu` and `rho`. `scores`
// holds one non-negative score per token and `foreground` one byte per
// token (non-zero for foreground), both row-major.
//
// # Safety
// `scores` and `foreground` must each point to `rows * cols` values,
// `config` must be a live handle and `out` writable storage for one handle.
enum TpStatus tp_prune(const struct TpConfig *config,
                       size_t rows,
                       size_t cols,
                       const double *scores,
                       const uint8_t *foreground,
                       struct TpSelection **out);

// Number of retained tokens; 0 for a null handle.
//
// # Safety
// `selection` must be null or a live handle from this library.
size_t tp_selection_len(const struct TpSelection *selection);

// The `i`-th retained token in row-major order and its stratum.
//
// # Safety
// `selection` must be a live handle; `token` and `stratum` writable.
enum TpStatus tp_selection_get(const struct TpSelection *selection,
                               size_t i,
                               size_t *token,
                               enum TpStratum *stratum);

// Writes the stratum of every grid token, pruned ones included, into `out`
// (`out_len` must be at least `rows * cols`).
//
// # Safety
// `selection` must be a live handle and `out` point to `out_len` writable
// values.
enum TpStatus tp_selection_strata(const struct TpSelection *selection,
                                  enum TpStratum *out,
                                  size_t out_len);

// # Safety
// `selection` must be null or a live handle from this library; it is
// invalid afterwards.
void tp_selection_free(struct TpSelection *selection);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOKENPRUNE_H */

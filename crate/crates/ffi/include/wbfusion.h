#ifndef WBFUSION_H
#define WBFUSION_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WbStatus {
  WB_STATUS_OK = 0,
  WB_STATUS_NULL_POINTER = 1,
  WB_STATUS_INVALID_UTF8 = 2,
  WB_STATUS_INDEX = 3,
  WB_STATUS_DIMENSION = 4,
  WB_STATUS_CONFIG = 5,
  WB_STATUS_SCHEMA = 6,
  WB_STATUS_UNSUPPORTED = 7,
  WB_STATUS_CAPABILITY = 8,
  WB_STATUS_NUMERIC = 9,
  WB_STATUS_DEGENERATE_WEIGHT = 10,
  WB_STATUS_SINGULAR = 11,
  WB_STATUS_PRECISION = 12,
  WB_STATUS_IO = 13,
  WB_STATUS_PANIC = 14,
} WbStatus;

// Hypothesis selector for sample access.
typedef enum WbHypothesis {
  WB_HYPOTHESIS_H0 = 0,
  WB_HYPOTHESIS_H1 = 1,
} WbHypothesis;

// Per-rule statistic samples under both hypotheses.
typedef struct WbSamples WbSamples;

// A validated experiment spec and its scenario.
typedef struct WbScenario WbScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Release with
// [`wb_string_free`].
char *wb_last_error_message(void);

// # Safety
// `s` must be null or a string returned by this library, released once.
void wb_string_free(char *s);

// Library version as a static NUL-terminated string.
const char *wb_version(void);

// # Safety
// `out` must be valid for writes.
enum WbStatus wb_q_inv(double p, double *out);

// Builds a scenario from experiment-spec JSON.
//
// # Safety
// `json` must be a NUL-terminated string and `out_handle` valid for writes.
enum WbStatus wb_scenario_from_json(const char *json, struct WbScenario **out_handle);

// Builds the scenario of a built-in preset.
//
// # Safety
// `name` must be a NUL-terminated string and `out_handle` valid for writes.
enum WbStatus wb_scenario_from_preset(const char *name, struct WbScenario **out_handle);

// # Safety
// `s` must be null or a handle from this library, released once.
void wb_scenario_free(struct WbScenario *s);

// Antennas, SUs, subcarriers and taps of a scenario.
//
// # Safety
// `s` must be a live handle; the out pointers must be valid for writes.
enum WbStatus wb_scenario_dims(const struct WbScenario *s,
                               size_t *n,
                               size_t *k,
                               size_t *l,
                               size_t *z);

// Effective noise power `sigma_e^2` of the scenario's active subcarrier.
//
// # Safety
// `s` must be a live handle and `out_value` valid for writes.
enum WbStatus wb_scenario_sigma_e2(const struct WbScenario *s, double *out_value);

// ISI power of subcarrier `l`.
//
// # Safety
// `s` must be a live handle and `out_value` valid for writes.
enum WbStatus wb_isi_power(const struct WbScenario *s, size_t l, double *out_value);

// ICI power of subcarrier `l`.
//
// # Safety
// `s` must be a live handle and `out_value` valid for writes.
enum WbStatus wb_ici_power(const struct WbScenario *s, size_t l, double *out_value);

// Optimum fusion LLR for homogeneous local probabilities.
//
// `y` holds `n` complex values and `g` an `n x k` row-major matrix, both as
// interleaved (re, im) pairs.
//
// # Safety
// `y` must point to `2n` doubles, `g` to `2nk` doubles and `out_value` must be
// valid for writes.
enum WbStatus wb_optimum_llr(const double *y,
                             const double *g,
                             size_t n,
                             size_t k,
                             double rho,
                             double sigma_e2,
                             double pd,
                             double pf,
                             double *out_value);

// Runs `trials` paired trials of the comma-separated `rules` on the
// scenario with per-trial fading and large-scale gains. `workers = 0` uses
// all cores.
//
// # Safety
// `s` must be a live handle, `rules` a NUL-terminated string and `out_handle`
// valid for writes.
enum WbStatus wb_run_trials(const struct WbScenario *s,
                            const char *rules,
                            uint64_t trials,
                            uint64_t seed,
                            size_t workers,
                            struct WbSamples **out_handle);

// # Safety
// `p` must be null or a handle from this library, released once.
void wb_samples_free(struct WbSamples *p);

// Number of trials held by `p`.
//
// # Safety
// `p` must be a live handle and `out_len` valid for writes.
enum WbStatus wb_samples_len(const struct WbSamples *p, size_t *out_len);

// Copies the samples of one rule and hypothesis into `buf`, which must hold
// at least [`wb_samples_len`] values.
//
// # Safety
// `p` must be a live handle, `rule` a NUL-terminated string and `buf` valid
// for `buf_len` writes.
enum WbStatus wb_samples_copy(const struct WbSamples *p,
                              const char *rule,
                              enum WbHypothesis hypothesis,
                              double *buf,
                              size_t buf_len);

// Area under the empirical ROC of one rule and its standard error.
//
// # Safety
// `p` must be a live handle, `rule` a NUL-terminated string and the out
// pointers valid for writes.
enum WbStatus wb_samples_auc(const struct WbSamples *p,
                             const char *rule,
                             double *auc,
                             double *auc_se);

// Runs the scenario's experiment and writes its CSV files into `out_dir`.
// `workers = 0` uses all cores.
//
// # Safety
// `s` must be a live handle and `out_dir` a NUL-terminated string.
enum WbStatus wb_run_experiment(const struct WbScenario *s, const char *out_dir, size_t workers);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WBFUSION_H */

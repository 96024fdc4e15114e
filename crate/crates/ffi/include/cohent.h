#ifndef COHENT_H
#define COHENT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum CohentStatus {
  COHENT_STATUS_OK = 0,
  COHENT_STATUS_NULL_POINTER = 1,
  COHENT_STATUS_INVALID_ARGUMENT = 2,
  // The input failed numerical validation (Hermiticity, trace, positivity, normalization).
  COHENT_STATUS_VALIDATION = 3,
  COHENT_STATUS_DIMENSION = 4,
  COHENT_STATUS_DOMAIN = 5,
  COHENT_STATUS_NOT_MCS = 6,
  COHENT_STATUS_PARSE = 7,
  COHENT_STATUS_IO = 8,
  COHENT_STATUS_PANIC = 99,
} CohentStatus;

typedef enum CohentMeasureKind {
  COHENT_MEASURE_KIND_EXACT = 0,
  COHENT_MEASURE_KIND_CLOSED_FORM = 1,
  COHENT_MEASURE_KIND_UPPER_BOUND = 2,
  COHENT_MEASURE_KIND_LOWER_BOUND = 3,
  COHENT_MEASURE_KIND_HEURISTIC_UPPER_BOUND = 4,
} CohentMeasureKind;

// Opaque density matrix handle.
typedef struct CohentState CohentState;

// A measure value with its kind.
typedef struct CohentMeasure {
  double value;
  enum CohentMeasureKind kind;
} CohentMeasure;

// One point of the depolarizing dynamics, closed forms only.
typedef struct CohentDynamicsPoint {
  double alpha;
  double p;
  double c_d;
  double c_f;
  double tau_med_ub;
  double tau_mef_lb;
  bool esd;
} CohentDynamicsPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *cohent_version(void);

// Message of the last failed call on this thread, or NULL. Valid until the next call.
const char *cohent_last_error_message(void);

void cohent_string_free(char *s);

// Parses a state in any accepted JSON encoding.
enum CohentStatus cohent_state_from_json(const char *json, struct CohentState **out);

// Named state: `basis`, `max_coherent`, `plus`, `bell`, `ghz`, `w3`.
enum CohentStatus cohent_state_standard(const char *name,
                                        const size_t *params,
                                        size_t n_params,
                                        struct CohentState **out);

void cohent_state_free(struct CohentState *state);

// Total Hilbert-space dimension, 0 for a null handle.
size_t cohent_state_dim(const struct CohentState *state);

size_t cohent_state_n_parties(const struct CohentState *state);

// Serializes the state as `{"dims", "re", "im"}` JSON.
enum CohentStatus cohent_state_to_json(const struct CohentState *state, char **out);

enum CohentStatus cohent_c_d(const struct CohentState *state, struct CohentMeasure *out);

enum CohentStatus cohent_c_f(const struct CohentState *state, struct CohentMeasure *out);

// `E_d` across a cut written as `"A|BC"`.
enum CohentStatus cohent_e_d(const struct CohentState *state,
                             const char *cut,
                             struct CohentMeasure *out);

// `E_f` across a cut written as `"A|BC"`.
enum CohentStatus cohent_e_f(const struct CohentState *state,
                             const char *cut,
                             struct CohentMeasure *out);

// Applies `U_mcn` with `ancillas` fresh ancillas. `max_residual` may be NULL.
enum CohentStatus cohent_convert(const struct CohentState *state,
                                 size_t ancillas,
                                 struct CohentState **out,
                                 double *max_residual);

// Runs the cyclic protocol on a qubit. `loss` receives the larger coherence loss;
// `trace_json` may be NULL, otherwise it receives the full trace.
enum CohentStatus cohent_cyclic(const struct CohentState *state,
                                uint64_t seed,
                                double *loss,
                                char **trace_json);

// Randomized inequality check. `violations` receives the total count; `report_json`
// may be NULL, otherwise it receives the per-relation reports.
enum CohentStatus cohent_verify(size_t samples,
                                size_t d,
                                size_t n,
                                uint64_t seed,
                                double tolerance,
                                size_t *violations,
                                char **report_json);

enum CohentStatus cohent_dynamics_point(double alpha, double p, struct CohentDynamicsPoint *out);

// Noise level at which the monogamy indicators vanish, from the closed form.
enum CohentStatus cohent_esd_probability(double alpha, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COHENT_H */

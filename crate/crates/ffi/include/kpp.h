#ifndef KPP_H
#define KPP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum KppStatus {
  KPP_STATUS_OK = 0,
  KPP_STATUS_INVALID_ARGUMENT = 1,
  KPP_STATUS_NULL_POINTER = 2,
  KPP_STATUS_NO_HOPF_INSTABILITY = 3,
  KPP_STATUS_NON_FINITE = 4,
  KPP_STATUS_NO_CONVERGENCE = 5,
  KPP_STATUS_INCONSISTENCY = 6,
  KPP_STATUS_CFL = 7,
  KPP_STATUS_INSUFFICIENT_DATA = 8,
  KPP_STATUS_IO = 9,
  KPP_STATUS_BUFFER_TOO_SMALL = 10,
  KPP_STATUS_PANIC = 11,
} KppStatus;

// Front trace selector for simulation queries.
typedef enum KppTraceKind {
  KPP_TRACE_KIND_LEVEL_SET = 0,
  KPP_TRACE_KIND_OSC_ENVELOPE = 1,
} KppTraceKind;

// Opaque limit cycle.
typedef struct KppLimitCycle KppLimitCycle;

// Opaque model parameters.
typedef struct KppModel KppModel;

// Opaque simulation result.
typedef struct KppSimulation KppSimulation;

// Spectrum of the linearisation at the coexistence state.
typedef struct KppHopfReport {
  double mu;
  double lambda_re;
  double lambda_im;
  bool stable;
  double mu_h;
  double mu_minus;
  double mu_plus;
} KppHopfReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread (empty after a success).
// The pointer stays valid until the next call into this library on the thread.
const char *kpp_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *kpp_version(void);

// Default mutation and competition matrices with mutation strength `mu > 0`.
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum KppStatus kpp_model_new(double mu, struct KppModel **out);

// Model with custom circulant rows `(a, b, c)` for the mutation and competition matrices.
//
// # Safety
// `mutation_row` and `competition_row` must point to 3 doubles; `out` to a handle slot.
enum KppStatus kpp_model_new_with_rows(double mu,
                                       const double *mutation_row,
                                       const double *competition_row,
                                       struct KppModel **out);

// Releases a model; null is ignored.
//
// # Safety
// `model` must come from `kpp_model_new*` and not be used afterwards.
void kpp_model_free(struct KppModel *model);

// Reaction term `u + μMu − (Cu)∘u`.
//
// # Safety
// `u` and `out` must point to 3 doubles; `model` must be a live handle.
enum KppStatus kpp_reaction(const struct KppModel *model, const double *u, double *out);

// Jacobian of the reaction term, 9 doubles in row-major order.
//
// # Safety
// `u` must point to 3 doubles and `out` to 9; `model` must be a live handle.
enum KppStatus kpp_jacobian(const struct KppModel *model, const double *u, double *out);

// Hopf spectrum of the default system at `mu`.
//
// # Safety
// `out` must be a valid pointer.
enum KppStatus kpp_hopf_analysis(double mu, struct KppHopfReport *out);

// First Lyapunov coefficient of the default system at the Hopf point.
//
// # Safety
// `out` must be a valid pointer.
enum KppStatus kpp_first_lyapunov_coefficient(double *out);

// Invasion speed of 0 (always 2) and the linear speed `2√(Re λ)` for `mu < μ_H`.
//
// # Safety
// `c_zero` and `c_lin` must be valid pointers.
enum KppStatus kpp_spreading_speeds(double mu, double *c_zero, double *c_lin);

// Speed threshold `7/(20√(μ_H − μ))` for `mu < μ_H`.
//
// # Safety
// `out` must be a valid pointer.
enum KppStatus kpp_sherratt_threshold(double mu, double *out);

// Limit cycle of the diffusionless system for `0 < mu < μ_H` (default settings).
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum KppStatus kpp_limit_cycle_find(double mu, struct KppLimitCycle **out);

// Period of a cycle; NaN for a null handle.
//
// # Safety
// `cycle` must be null or a live handle.
double kpp_limit_cycle_period(const struct KppLimitCycle *cycle);

// Largest `|β|` along a cycle; NaN for a null handle.
//
// # Safety
// `cycle` must be null or a live handle.
double kpp_limit_cycle_beta_max(const struct KppLimitCycle *cycle);

// Number of stored samples (each 3 doubles); 0 for a null handle.
//
// # Safety
// `cycle` must be null or a live handle.
uintptr_t kpp_limit_cycle_len(const struct KppLimitCycle *cycle);

// Copies the samples as `u1, u2, u3` triples into `buf` of `capacity` doubles.
//
// # Safety
// `buf` must point to `capacity` writable doubles; `cycle` must be a live handle.
enum KppStatus kpp_limit_cycle_copy_samples(const struct KppLimitCycle *cycle,
                                            double *buf,
                                            uintptr_t capacity);

// Releases a cycle; null is ignored.
//
// # Safety
// `cycle` must come from `kpp_limit_cycle_find` and not be used afterwards.
void kpp_limit_cycle_free(struct KppLimitCycle *cycle);

// Floquet multipliers (real and imaginary parts) and exponents of the shifted
// operator `A(t) − ω²I` along a cycle, sorted by decreasing modulus.
//
// # Safety
// The three output pointers must each hold 3 doubles; `cycle` must be a live handle.
enum KppStatus kpp_floquet(const struct KppLimitCycle *cycle,
                           double omega,
                           double *multipliers_re,
                           double *multipliers_im,
                           double *exponents);

// Runs a simulation from a JSON configuration (unset fields take the full-scale
// defaults; unknown fields are rejected). A null or empty string uses the defaults.
//
// # Safety
// `config_json` must be null or a NUL-terminated string; `out` a handle slot.
enum KppStatus kpp_simulation_run(const char *config_json, struct KppSimulation **out);

// Number of samples of a front trace; 0 for a null handle.
//
// # Safety
// `sim` must be null or a live handle.
uintptr_t kpp_simulation_trace_len(const struct KppSimulation *sim, enum KppTraceKind kind);

// Copies a front trace; gaps are written as NaN.
//
// # Safety
// `times` and `positions` must each hold `capacity` doubles; `sim` must be a live handle.
enum KppStatus kpp_simulation_copy_trace(const struct KppSimulation *sim,
                                         enum KppTraceKind kind,
                                         double *times,
                                         double *positions,
                                         uintptr_t capacity);

// Least-squares front speed over `[t0, t1]`.
//
// # Safety
// `speed` and `r2` must be valid pointers; `sim` must be a live handle.
enum KppStatus kpp_simulation_estimate_speed(const struct KppSimulation *sim,
                                             enum KppTraceKind kind,
                                             double t0,
                                             double t1,
                                             double *speed,
                                             double *r2);

// Releases a simulation; null is ignored.
//
// # Safety
// `sim` must come from `kpp_simulation_run` and not be used afterwards.
void kpp_simulation_free(struct KppSimulation *sim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KPP_H */

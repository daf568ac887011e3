#ifndef EIGSOLVE_H
#define EIGSOLVE_H

/* Generated by cbindgen. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum EigStatus {
  EigStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  EigStatus_NullPointer = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  EigStatus_InvalidUtf8 = 2,
  /**
   * An index argument was out of range.
   */
  EigStatus_IndexOutOfRange = 3,
  /**
   * The operation failed; see `eig_last_error`.
   */
  EigStatus_Failed = 4,
} EigStatus;

/**
 * Opaque handle for a Hermitian observable.
 */
typedef struct EigObservable EigObservable;

/**
 * Opaque handle for a completed protocol run.
 */
typedef struct EigRunRecord EigRunRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy of the most recent error message on this thread, or null if none.
 */
char *eig_last_error(void);

/**
 * Release a string returned by this library.
 */
void eig_string_free(char *s);

/**
 * Load an observable from a preset name or an observable file path.
 *
 * # Safety
 * `spec` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum EigStatus eig_observable_load(const char *spec, struct EigObservable **out);

/**
 * Matrix dimension of the observable, or 0 for a null handle.
 */
uintptr_t eig_observable_dim(const struct EigObservable *obs);

/**
 * Label of the observable. Free with `eig_string_free`.
 */
char *eig_observable_label(const struct EigObservable *obs);

/**
 * Release an observable handle.
 */
void eig_observable_free(struct EigObservable *obs);

/**
 * Run the staged protocol with the per-preset default schedule.
 *
 * # Safety
 * `obs` and `out` must be valid pointers.
 */
enum EigStatus eig_run(const struct EigObservable *obs, uint64_t seed, struct EigRunRecord **out);

/**
 * Total single-shot measurements consumed by the run.
 */
uint64_t eig_run_total_iterations(const struct EigRunRecord *rec);

/**
 * 1 if every stage reached the reward threshold, 0 otherwise.
 */
int32_t eig_run_converged(const struct EigRunRecord *rec);

/**
 * Exact eigenvector overlap fidelity of one agent column.
 *
 * # Safety
 * `rec` and `out` must be valid pointers.
 */
enum EigStatus eig_run_overlap_fidelity(const struct EigRunRecord *rec,
                                        uintptr_t basis_index,
                                        double *out);

/**
 * Full run record serialized as JSON. Free with `eig_string_free`.
 */
char *eig_run_to_json(const struct EigRunRecord *rec);

/**
 * Release a run record handle.
 */
void eig_run_free(struct EigRunRecord *rec);

/**
 * RL versus VQE shot comparison serialized as JSON.
 * `vqe_shots` of 0 selects the per-preset default. Free the result
 * with `eig_string_free`; null signals failure.
 *
 * # Safety
 * `spec` must be a valid NUL-terminated string.
 */
char *eig_compare_json(const char *spec, uint64_t seed, uintptr_t vqe_shots);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EIGSOLVE_H */

#ifndef SPINQUENCH_H
#define SPINQUENCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SqStatus {
  SQ_STATUS_OK = 0,
  SQ_STATUS_NULL_POINTER = 1,
  SQ_STATUS_INVALID_ARGUMENT = 2,
  SQ_STATUS_EMPTY_SECTOR = 3,
  SQ_STATUS_CAPACITY = 4,
  SQ_STATUS_DIMENSION_MISMATCH = 5,
  SQ_STATUS_BASIS_MISMATCH = 6,
  SQ_STATUS_CONVERGENCE = 7,
  SQ_STATUS_CONFIG = 8,
  SQ_STATUS_IO = 9,
  SQ_STATUS_PANIC = 10,
} SqStatus;

typedef enum SqMethod {
  SQ_METHOD_DENSE = 0,
  SQ_METHOD_KRYLOV = 1,
} SqMethod;

// Opaque spin basis.
typedef struct SqBasis SqBasis;

// Opaque sparse Hamiltonian.
typedef struct SqOperator SqOperator;

// Opaque state vector.
typedef struct SqState SqState;

// Chain parameters. When `use_theta` is true the couplings are
// `(j0 cos θ, j0 sin θ)` and `j1`, `j2` are ignored.
typedef struct SqModelParams {
  size_t length;
  uint32_t two_s;
  bool use_theta;
  double j0;
  double theta;
  double j1;
  double j2;
  double h0;
  double gamma;
  double d;
} SqModelParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or an empty string.
// The pointer stays valid until the next call into this library on the same thread.
const char *sq_last_error(void);

// Library version as a static NUL-terminated string.
const char *sq_version(void);

// `(Sᶻ_tot / (L·S))²`; returns NaN for `length == 0` or `two_s == 0`.
double sq_thermal_imbalance(size_t length, uint32_t two_s, int64_t two_sz_total);

// Build the basis of all configurations with `2Sᶻ_tot = two_sz_total`, or
// the full product space when `constrained` is false.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum SqStatus sq_basis_new(size_t length,
                           uint32_t two_s,
                           bool constrained,
                           int64_t two_sz_total,
                           struct SqBasis **out);

// # Safety
// `basis` must be a live handle and `out` writable.
enum SqStatus sq_basis_len(const struct SqBasis *basis, size_t *out);

// Ordinal of the configuration `pattern` (`length` entries of `m_j = 2Sᶻ_j`).
// Sets `*found` to false when the configuration is outside the basis.
//
// # Safety
// `pattern` must point to `length` readable values; `out` and `found` writable.
enum SqStatus sq_basis_index_of(const struct SqBasis *basis,
                                const int32_t *pattern,
                                size_t length,
                                size_t *out,
                                bool *found);

// # Safety
// `basis` must be null or a handle from [`sq_basis_new`] not yet freed.
void sq_basis_free(struct SqBasis *basis);

// Assemble the Hamiltonian on `basis`.
//
// # Safety
// `basis` must be a live handle, `params` readable and `out` writable.
enum SqStatus sq_hamiltonian_new(const struct SqBasis *basis,
                                 const struct SqModelParams *params,
                                 struct SqOperator **out);

// # Safety
// `op` must be a live handle; `dim` and `nnz` writable.
enum SqStatus sq_operator_shape(const struct SqOperator *op, size_t *dim, size_t *nnz);

// Matrix element `⟨row|H|col⟩`.
//
// # Safety
// `op` must be a live handle and `out` writable.
enum SqStatus sq_operator_get(const struct SqOperator *op, size_t row, size_t col, double *out);

// # Safety
// `op` must be null or a handle from [`sq_hamiltonian_new`] not yet freed.
void sq_operator_free(struct SqOperator *op);

// Product state `|m_1 … m_L⟩` on `basis`.
//
// # Safety
// `pattern` must point to `length` readable values; `out` writable.
enum SqStatus sq_state_product(const struct SqBasis *basis,
                               const int32_t *pattern,
                               size_t length,
                               struct SqState **out);

// `⟨Sᶻ_j⟩` for `j = 1..=L` into `out[0..L]`.
//
// # Safety
// `out` must have room for `capacity` values.
enum SqStatus sq_state_magnetization(const struct SqState *state,
                                     const struct SqBasis *basis,
                                     double *out,
                                     size_t capacity);

// # Safety
// `state` must be null or a handle from [`sq_state_product`] not yet freed.
void sq_state_free(struct SqState *state);

// Evolve `state` under `op` and record the imbalance and the entanglement
// entropy (bits, bond after site `cut`) at each of the `n_times` ascending
// times starting at 0. Either output pointer may be null.
//
// # Safety
// `times` must hold `n_times` values; non-null outputs must have room for `n_times`.
enum SqStatus sq_simulate(const struct SqOperator *op,
                          const struct SqBasis *basis,
                          const struct SqState *state,
                          enum SqMethod method,
                          const double *times,
                          size_t n_times,
                          size_t cut,
                          double *imbalance_out,
                          double *entropy_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINQUENCH_H */

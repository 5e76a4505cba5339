#ifndef OBLIQUE_VQE_H
#define OBLIQUE_VQE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  OVQ_MODEL_QOMM = 0,
  OVQ_MODEL_QTPM = 1,
  OVQ_MODEL_QL1M = 2,
  OVQ_MODEL_WQL1M = 3,
} OvqModel;

typedef enum {
  OVQ_METHOD_SIMPLEX = 0,
  OVQ_METHOD_TRUST_REGION = 1,
  OVQ_METHOD_RIEMANNIAN_GD = 2,
} OvqMethod;

typedef enum {
  OVQ_STATUS_OK = 0,
  OVQ_STATUS_NULL_POINTER = 1,
  OVQ_STATUS_INVALID_INPUT = 2,
  OVQ_STATUS_DIMENSION_MISMATCH = 3,
  OVQ_STATUS_NOT_HERMITIAN = 4,
  OVQ_STATUS_NOT_NEGATIVE_DEFINITE = 5,
  OVQ_STATUS_MU_TOO_SMALL = 6,
  OVQ_STATUS_INVALID_WEIGHTS = 7,
  OVQ_STATUS_NUMERICAL_FAILURE = 8,
  OVQ_STATUS_BUFFER_TOO_SMALL = 9,
  OVQ_STATUS_PANIC = 10,
} OvqStatus;

/**
 * Hermitian operator handle.
 */
typedef struct OvqOperator OvqOperator;

/**
 * Result of [`ovq_solve`].
 */
typedef struct OvqSolution OvqSolution;

/**
 * Solver settings. `weights` may be null for the default p, p-1, ..., 1.
 */
typedef struct {
  OvqModel model;
  OvqMethod method;
  size_t p;
  double mu;
  double mu1;
  size_t max_iters;
  uint64_t seed;
  const double *weights;
  size_t num_weights;
} OvqSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Defaults: gradient descent, p = 1, mu = mu1 = 1, 600 iterations, seed 0.
 */
OvqSolveOptions ovq_default_options(OvqModel model);

/**
 * Builds an n×n operator from row-major real and (nullable) imaginary parts.
 *
 * # Safety
 * `re` and, when non-null, `im` must point to n·n readable doubles; `out` must be writable.
 */
OvqStatus ovq_operator_new(size_t n, const double *re, const double *im, OvqOperator **out);

/**
 * Dimension of the operator, or 0 for a null handle.
 *
 * # Safety
 * `op` must be null or a live handle from [`ovq_operator_new`].
 */
size_t ovq_operator_dim(const OvqOperator *op);

/**
 * # Safety
 * `op` must be null or a handle from [`ovq_operator_new`] not yet freed.
 */
void ovq_operator_free(OvqOperator *op);

/**
 * Minimizes the chosen model and extracts the p lowest eigenpairs.
 *
 * # Safety
 * `op` must be a live operator, `opts` readable, `out` writable, and
 * `opts.weights` null or pointing to `opts.num_weights` doubles.
 */
OvqStatus ovq_solve(const OvqOperator *op, const OvqSolveOptions *opts, OvqSolution **out);

/**
 * Number of eigenvalues in the solution, or 0 for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle from [`ovq_solve`].
 */
size_t ovq_solution_count(const OvqSolution *sol);

/**
 * Copies the ascending Ritz values into `out`, which holds `len` doubles.
 *
 * # Safety
 * `sol` must be a live handle and `out` must have room for `len` doubles.
 */
OvqStatus ovq_solution_eigenvalues(const OvqSolution *sol, double *out, size_t len);

/**
 * Writes the objective, the eigenvalue relative error and the orthogonality
 * error; any output pointer may be null.
 *
 * # Safety
 * `sol` must be a live handle; non-null outputs must be writable.
 */
OvqStatus ovq_solution_metrics(const OvqSolution *sol,
                               double *objective,
                               double *eigenvalue_rel_error,
                               double *orthogonality_error);

/**
 * Objective evaluations spent, or 0 for a null handle.
 *
 * # Safety
 * `sol` must be null or a live handle from [`ovq_solve`].
 */
size_t ovq_solution_evaluations(const OvqSolution *sol);

/**
 * # Safety
 * `sol` must be null or a handle from [`ovq_solve`] not yet freed.
 */
void ovq_solution_free(OvqSolution *sol);

/**
 * Inner-product circuits per objective evaluation for `num_terms` Pauli terms.
 *
 * # Safety
 * Both outputs must be writable.
 */
OvqStatus ovq_resource_count(OvqModel model,
                             uint64_t p,
                             uint64_t num_terms,
                             uint64_t *hamiltonian_circuits,
                             uint64_t *regularization_circuits);

/**
 * Copies the last error message of this thread, NUL-terminated and truncated
 * to `len` bytes. Returns the buffer size needed, or 0 when there is no error.
 *
 * # Safety
 * `buf` must be null or have room for `len` bytes.
 */
size_t ovq_last_error(char *buf, size_t len);

/**
 * Static name of a status code.
 */
const char *ovq_status_name(OvqStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OBLIQUE_VQE_H */

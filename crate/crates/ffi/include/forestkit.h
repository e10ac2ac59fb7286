#ifndef FORESTKIT_H
#define FORESTKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FkStatus {
  FK_STATUS_OK = 0,
  FK_STATUS_NULL_POINTER = 1,
  FK_STATUS_INVALID_GRAPH = 2,
  FK_STATUS_INVALID_PARAMETER = 3,
  FK_STATUS_BUFFER_TOO_SMALL = 4,
  FK_STATUS_NUMERICAL = 5,
  FK_STATUS_NOT_STRONGLY_CONNECTED = 6,
  FK_STATUS_INVALID_UTF8 = 7,
  FK_STATUS_PANIC = 8,
} FkStatus;

typedef enum FkMeasure {
  /**
   * `J(tau)`; the parameter is `tau`.
   */
  FK_MEASURE_OUT = 0,
  /**
   * In-forest counterpart of `Out`; the parameter is `tau`.
   */
  FK_MEASURE_IN = 1,
  FK_MEASURE_LIMITING_OUT = 2,
  FK_MEASURE_LIMITING_IN = 3,
  /**
   * Dense-forest measure; the parameter is `alpha`.
   */
  FK_MEASURE_DENSE_OUT = 4,
} FkMeasure;

typedef enum FkScoreMethod {
  FK_SCORE_METHOD_KERNEL_MEAN = 0,
  FK_SCORE_METHOD_DANIELS_TREE = 1,
  /**
   * The parameter is `tau`.
   */
  FK_SCORE_METHOD_BORDA = 2,
} FkScoreMethod;

/**
 * Opaque weighted digraph.
 */
typedef struct FkGraph FkGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses an edge list (`n <count>` header, then `tail<TAB>head<TAB>weight`
 * lines) into a new handle stored at `*out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FkStatus fk_graph_parse(const char *text, struct FkGraph **out);

/**
 * Builds a digraph on `n` vertices from `m` arcs `tails[a] -> heads[a]` with
 * weights `weights[a]`, storing a new handle at `*out`.
 *
 * # Safety
 * The three arrays must hold `m` elements each; `out` must be valid.
 */
enum FkStatus fk_graph_from_arcs(size_t n,
                                 const size_t *tails,
                                 const size_t *heads,
                                 const double *weights,
                                 size_t m,
                                 struct FkGraph **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `g` must come from this library and not be used afterwards.
 */
void fk_graph_free(struct FkGraph *g);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t fk_graph_vertex_count(const struct FkGraph *g);

/**
 * Stores the number of source knots `d'` at `*out`.
 *
 * # Safety
 * `g` must be a live handle and `out` valid.
 */
enum FkStatus fk_out_forest_dimension(const struct FkGraph *g, size_t *out);

/**
 * Writes `sigma_0, ..., sigma_{n-d'}` to `out` and their count to `*count`.
 * With a short buffer only `*count` is set and `BUFFER_TOO_SMALL` returned.
 *
 * # Safety
 * `g` must be a live handle, `out` must hold `len` doubles, `count` valid.
 */
enum FkStatus fk_forest_coefficients(const struct FkGraph *g,
                                     double *out,
                                     size_t len,
                                     size_t *count);

/**
 * Writes `J(tau) = (I + tau L)^-1`.
 *
 * # Safety
 * `g` must be a live handle and `out` must hold `len` doubles.
 */
enum FkStatus fk_parametric_matrix(const struct FkGraph *g, double tau, double *out, size_t len);

/**
 * Writes the limiting matrix of maximum out-forests.
 *
 * # Safety
 * `g` must be a live handle and `out` must hold `len` doubles.
 */
enum FkStatus fk_limiting_matrix(const struct FkGraph *g, double *out, size_t len);

/**
 * Writes an accessibility matrix. `param` is `tau` or `alpha` as the measure
 * requires and is ignored by the limiting measures.
 *
 * # Safety
 * `g` must be a live handle and `out` must hold `len` doubles.
 */
enum FkStatus fk_accessibility(const struct FkGraph *g,
                               enum FkMeasure measure,
                               double param,
                               double *out,
                               size_t len);

/**
 * Writes one score per vertex. `param` is `tau` for Borda scores and is
 * ignored otherwise.
 *
 * # Safety
 * `g` must be a live handle and `out` must hold `len` doubles.
 */
enum FkStatus fk_scores(const struct FkGraph *g,
                        enum FkScoreMethod method,
                        double param,
                        double *out,
                        size_t len);

/**
 * Writes the Cesaro limit of the inverse chain `I - alpha L^T`. A NaN
 * `alpha` selects the default step; `*iterations` receives the number of
 * squarings. Non-convergence within `max_iters` returns `NUMERICAL`.
 *
 * # Safety
 * `g` must be a live handle, `out` must hold `len` doubles, `iterations`
 * must be null or valid.
 */
enum FkStatus fk_cesaro_limit(const struct FkGraph *g,
                              double alpha,
                              size_t max_iters,
                              double tol,
                              double *out,
                              size_t len,
                              size_t *iterations);

/**
 * Message for the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next call on the same thread.
 */
const char *fk_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fk_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FORESTKIT_H */

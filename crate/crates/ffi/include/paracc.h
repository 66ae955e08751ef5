#ifndef PARACC_H
#define PARACC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ParaccStatus {
  PARACC_STATUS_OK = 0,
  PARACC_STATUS_NULL_POINTER = 1,
  PARACC_STATUS_INVALID_PARAMETER = 2,
  PARACC_STATUS_INVALID_GRAPH = 3,
  PARACC_STATUS_PARSE = 4,
  PARACC_STATUS_SIZE_LIMIT = 5,
  PARACC_STATUS_ZERO_VOLUME = 6,
  PARACC_STATUS_UNDEFINED = 7,
  PARACC_STATUS_NOT_CONVERGED = 8,
  PARACC_STATUS_IO = 9,
  PARACC_STATUS_BUFFER_TOO_SMALL = 10,
  PARACC_STATUS_PANIC = 11,
} ParaccStatus;

typedef enum ParaccCutPenalty {
  PARACC_CUT_PENALTY_ALL_OR_NOTHING = 0,
  PARACC_CUT_PENALTY_LINEAR = 1,
} ParaccCutPenalty;

typedef enum ParaccWeightMode {
  PARACC_WEIGHT_MODE_UNIT = 0,
  PARACC_WEIGHT_MODE_DEGREE = 1,
} ParaccWeightMode;

typedef enum ParaccRegime {
  PARACC_REGIME_MATCHING = 0,
  PARACC_REGIME_BICLUSTER_DELETION = 1,
  PARACC_REGIME_MU_ZERO = 2,
  PARACC_REGIME_EQUAL_MU = 3,
  PARACC_REGIME_SWEEP = 4,
  PARACC_REGIME_FIXED = 5,
} ParaccRegime;

/*
 Opaque bipartite graph handle.
 */
typedef struct ParaccBipartite ParaccBipartite;

/*
 Opaque clustering handle.
 */
typedef struct ParaccClustering ParaccClustering;

/*
 Opaque hypergraph handle.
 */
typedef struct ParaccHypergraph ParaccHypergraph;

/*
 Summary of [`paracc_pbcc_round`]. Absent values are NaN.
 */
typedef struct ParaccRoundInfo {
  enum ParaccRegime regime;
  double delta;
  double alpha;
  /*
   PBCC objective of the returned clustering.
   */
  double objective;
  double lp_objective;
  double lp_lower_bound;
  /*
   1 if the LP solve converged, 0 if not, -1 if no LP was solved.
   */
  int32_t lp_converged;
  /*
   1 if the approximation checker passed, 0 if it failed, -1 if not run.
   */
  int32_t check_passed;
} ParaccRoundInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *paracc_version(void);

/*
 Message for the last failed call on this thread. The pointer stays valid
 until the next failing call on the same thread.
 */
const char *paracc_last_error_message(void);

/*
 Build a hypergraph from CSR arrays: hyperedge `e` holds
 `nodes[offsets[e] .. offsets[e + 1]]`. `weights` may be NULL (all 1).

 # Safety
 `offsets` must point to `num_edges + 1` values, `nodes` to
 `offsets[num_edges]` values, `weights` (if not NULL) to `num_edges` values.
 */
enum ParaccStatus paracc_hypergraph_new(size_t n,
                                        const size_t *offsets,
                                        const size_t *nodes,
                                        const double *weights,
                                        size_t num_edges,
                                        struct ParaccHypergraph **out);

/*
 # Safety
 `h` must be NULL or a handle from [`paracc_hypergraph_new`] not yet freed.
 */
void paracc_hypergraph_free(struct ParaccHypergraph *h);

/*
 Build a bipartite graph from `m` edges `(left[k], right[k])`, each id
 local to its side.

 # Safety
 `left` and `right` must each point to `m` values.
 */
enum ParaccStatus paracc_bipartite_new(size_t n1,
                                       size_t n2,
                                       const size_t *left,
                                       const size_t *right,
                                       size_t m,
                                       struct ParaccBipartite **out);

/*
 # Safety
 `g` must be NULL or a handle from [`paracc_bipartite_new`] not yet freed.
 */
void paracc_bipartite_free(struct ParaccBipartite *g);

/*
 Clustering from arbitrary labels; clusters are renumbered by first
 appearance.

 # Safety
 `labels` must point to `n` values.
 */
enum ParaccStatus paracc_clustering_new(const size_t *labels,
                                        size_t n,
                                        struct ParaccClustering **out);

/*
 # Safety
 `c` must be NULL or a clustering handle not yet freed.
 */
void paracc_clustering_free(struct ParaccClustering *c);

/*
 Number of nodes, or 0 for NULL.

 # Safety
 `c` must be NULL or a live clustering handle.
 */
size_t paracc_clustering_len(const struct ParaccClustering *c);

/*
 Number of clusters, or 0 for NULL.

 # Safety
 `c` must be NULL or a live clustering handle.
 */
size_t paracc_clustering_num_clusters(const struct ParaccClustering *c);

/*
 Copy the canonical cluster ids into `buf`, which must hold at least
 `paracc_clustering_len(c)` values.

 # Safety
 `c` must be a live clustering handle and `buf` must point to `len`
 writable values.
 */
enum ParaccStatus paracc_clustering_assignment(const struct ParaccClustering *c,
                                               size_t *buf,
                                               size_t len);

/*
 # Safety
 Handles must be live; `out` must be writable.
 */
enum ParaccStatus paracc_pbcc_objective(const struct ParaccBipartite *g,
                                        const struct ParaccClustering *c,
                                        double mu1,
                                        double mu2,
                                        double beta,
                                        double *out);

/*
 # Safety
 Handles must be live; `out` must be writable.
 */
enum ParaccStatus paracc_hyperlam_objective(const struct ParaccHypergraph *h,
                                            const struct ParaccClustering *c,
                                            double lambda,
                                            enum ParaccCutPenalty cut,
                                            enum ParaccWeightMode weights,
                                            double *out);

/*
 Solve the PBCC LP and round. A NaN `delta` selects the threshold from the
 parameter regime; otherwise `delta` is used as given. `info` may be NULL.

 # Safety
 `g` must be live; `out` must be writable; `info` must be NULL or writable.
 */
enum ParaccStatus paracc_pbcc_round(const struct ParaccBipartite *g,
                                    double mu1,
                                    double mu2,
                                    double beta,
                                    double delta,
                                    uint64_t seed,
                                    struct ParaccClustering **out,
                                    struct ParaccRoundInfo *info);

/*
 Lambda-Louvain on the clique expansion (all-or-nothing) or the star
 expansion (linear).

 # Safety
 `h` must be live; `out` must be writable.
 */
enum ParaccStatus paracc_hyperlam_louvain(const struct ParaccHypergraph *h,
                                          double lambda,
                                          enum ParaccCutPenalty cut,
                                          enum ParaccWeightMode weights,
                                          uint64_t seed,
                                          struct ParaccClustering **out);

/*
 # Safety
 Handles must be live; `out` must be writable.
 */
enum ParaccStatus paracc_ari(const struct ParaccClustering *a,
                             const struct ParaccClustering *b,
                             double *out);

/*
 Evaluate the bad-triangle case bounds. `min_margin` receives the smallest
 margin over applicable cases and the two pair conditions; either output
 may be NULL.

 # Safety
 Non-NULL outputs must be writable.
 */
enum ParaccStatus paracc_verify_case_bounds(double mu,
                                            double beta,
                                            double delta,
                                            double alpha,
                                            bool *passed,
                                            double *min_margin);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARACC_H */

#ifndef BRAIDQP_H
#define BRAIDQP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum BqStatus {
  BQ_STATUS_OK = 0,
  BQ_STATUS_NULL_ARGUMENT = 1,
  BQ_STATUS_INVALID_UTF8 = 2,
  BQ_STATUS_PARSE = 3,
  BQ_STATUS_INVALID_GRAPH = 4,
  BQ_STATUS_UNKNOWN_LABEL = 5,
  BQ_STATUS_INVALID_MOVE = 6,
  BQ_STATUS_CONDITIONS = 7,
  BQ_STATUS_PRECONDITION = 8,
  BQ_STATUS_POTENTIAL = 9,
  BQ_STATUS_UNSUPPORTED = 10,
  BQ_STATUS_INVARIANT = 11,
  BQ_STATUS_IO = 12,
  BQ_STATUS_PANIC = 13,
} BqStatus;

/*
 Coefficient choice for a primitive potential.
 */
typedef enum BqSeeding {
  BQ_SEEDING_ONES = 0,
  BQ_SEEDING_POWERS_OF_TWO = 1,
} BqSeeding;

/*
 The quiver `Q(x~)` of a word together with the word and its graph.
 */
typedef struct BqBraidQuiver BqBraidQuiver;

/*
 A simply-laced graph.
 */
typedef struct BqGraph BqGraph;

/*
 A quiver with potential.
 */
typedef struct BqQp BqQp;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or NULL after a
 successful call. The pointer stays valid until the next `bq_*` call on
 the same thread.
 */
const char *bq_last_error_message(void);

/*
 Releases a string returned by this library. NULL is ignored.

 # Safety
 `s` must come from this library and must not be freed twice.
 */
void bq_string_free(char *s);

/*
 Parses a graph description (`vertices: ...` and `edge: a b` lines).

 # Safety
 `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BqStatus bq_graph_parse(const char *source, struct BqGraph **out);

/*
 Builtin graph by name: `aN` for the path, `cycleN` for the cycle.

 # Safety
 `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BqStatus bq_graph_builtin(const char *name, struct BqGraph **out);

/*
 # Safety
 `g` must be NULL or a handle from this library not yet freed.
 */
void bq_graph_free(struct BqGraph *g);

/*
 First Betti number of the graph.

 # Safety
 `g` must be a live handle and `out` a valid pointer.
 */
enum BqStatus bq_graph_betti(const struct BqGraph *g, size_t *out);

/*
 Builds `Q(x)` for a word and returns it as JSON.

 # Safety
 `g` must be a live handle, `word` a NUL-terminated string, `out` valid.
 */
enum BqStatus bq_build_qx_json(const struct BqGraph *g, const char *word, char **out);

/*
 Builds `Q(x~)` for a word.

 # Safety
 `g` must be a live handle, `word` a NUL-terminated string, `out` valid.
 */
enum BqStatus bq_build_qxtilde(const struct BqGraph *g,
                               const char *word,
                               struct BqBraidQuiver **out);

/*
 # Safety
 `bq` must be NULL or a handle from this library not yet freed.
 */
void bq_braid_quiver_free(struct BqBraidQuiver *bq);

/*
 The quiver as JSON.

 # Safety
 `bq` must be a live handle and `out` a valid pointer.
 */
enum BqStatus bq_braid_quiver_to_json(const struct BqBraidQuiver *bq, char **out);

/*
 The word of the quiver, in the same notation the parser accepts.

 # Safety
 `bq` must be a live handle and `out` a valid pointer.
 */
enum BqStatus bq_braid_quiver_word(const struct BqBraidQuiver *bq, char **out);

/*
 A primitive potential on `Q(x~)`, with all coefficients 1 or with
 seeded signed powers of two.

 # Safety
 `bq` must be a live handle and `out` a valid pointer.
 */
enum BqStatus bq_qp_primitive(const struct BqBraidQuiver *bq,
                              enum BqSeeding seeding,
                              uint64_t seed,
                              uint32_t max_exp,
                              struct BqQp **out);

/*
 # Safety
 `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BqStatus bq_qp_from_json(const char *json, struct BqQp **out);

/*
 # Safety
 `qp` must be a live handle and `out` a valid pointer.
 */
enum BqStatus bq_qp_to_json(const struct BqQp *qp, char **out);

/*
 # Safety
 `qp` must be NULL or a handle from this library not yet freed.
 */
void bq_qp_free(struct BqQp *qp);

/*
 Mutation at a vertex written `dec,idx`.

 # Safety
 `qp` must be a live handle, `vertex` a NUL-terminated string, `out` valid.
 */
enum BqStatus bq_qp_mutate(const struct BqQp *qp, const char *vertex, struct BqQp **out);

/*
 Applies a braid move `kind@position` and mutates the potential of `qp`
 along it. Returns the quiver of the new word and the moved QP.

 # Safety
 Handles must be live, `mv` a NUL-terminated string, outputs valid.
 */
enum BqStatus bq_mutate_along_move(const struct BqBraidQuiver *bq,
                                   const struct BqQp *qp,
                                   const char *mv,
                                   struct BqBraidQuiver **out_bq,
                                   struct BqQp **out_qp);

/*
 Size of the 2-cycle basis and the twisted class of a primitive
 potential, the latter formatted as `[c1, c2, ...]`.

 # Safety
 Handles must be live and outputs valid.
 */
enum BqStatus bq_twisted_class(const struct BqBraidQuiver *bq,
                               const struct BqQp *qp,
                               size_t *out_rank,
                               char **out_class);

/*
 Whether two primitive potentials on `Q(x~)` are right-equivalent.

 # Safety
 Handles must be live and `out` valid.
 */
enum BqStatus bq_right_equivalent(const struct BqBraidQuiver *bq,
                                  const struct BqQp *qp1,
                                  const struct BqQp *qp2,
                                  bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BRAIDQP_H */

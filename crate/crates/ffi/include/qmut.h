#ifndef QMUT_H
#define QMUT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QmutFamily {
  QMUT_FAMILY_ODD = 0,
  QMUT_FAMILY_EVEN_A = 1,
  QMUT_FAMILY_EVEN_B = 2,
} QmutFamily;

// Status codes. Values 2 to 6 coincide with the exit codes of the `qmut` CLI.
typedef enum QmutStatus {
  QMUT_STATUS_OK = 0,
  QMUT_STATUS_NULL_POINTER = 1,
  QMUT_STATUS_PARSE = 2,
  QMUT_STATUS_VERTEX_OUT_OF_RANGE = 3,
  QMUT_STATUS_INFINITE = 4,
  QMUT_STATUS_BUDGET_EXHAUSTED = 5,
  QMUT_STATUS_NO_PATH = 6,
  QMUT_STATUS_INVALID_ARGUMENT = 8,
  QMUT_STATUS_NO_REALIZATION = 9,
  QMUT_STATUS_PANIC = 10,
  QMUT_STATUS_OTHER = 11,
} QmutStatus;

typedef enum QmutVerdict {
  QMUT_VERDICT_FINITE = 0,
  QMUT_VERDICT_INFINITE = 1,
  QMUT_VERDICT_BUDGET_EXHAUSTED = 2,
} QmutVerdict;

// Opaque quiver handle.
typedef struct QmutQuiver QmutQuiver;

// Opaque realization handle (a Gram matrix together with its ambient order).
typedef struct QmutRealization QmutRealization;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next `qmut_*` call on the same thread.
const char *qmut_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string returned by this library that was not freed yet.
void qmut_string_free(char *s);

// Parses a quiver JSON document.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum QmutStatus qmut_quiver_from_json(const char *json, struct QmutQuiver **out);

// Copies a built-in seed by name (`"H3"`, `"h4_11"`, ...).
//
// # Safety
// `name` must be a nul-terminated string; `out` must be writable.
enum QmutStatus qmut_quiver_builtin(const char *name, struct QmutQuiver **out);

// Standard-form quiver of a rank-4 series tuple.
//
// # Safety
// `out` must be writable.
enum QmutStatus qmut_series_realize(enum QmutFamily family,
                                    uint32_t n,
                                    uint32_t k,
                                    uint32_t q,
                                    uint32_t m,
                                    uint32_t s,
                                    struct QmutQuiver **out);

// # Safety
// `q` must be null or a handle from this library that was not freed yet.
void qmut_quiver_free(struct QmutQuiver *q);

// Serializes to a JSON document.
//
// # Safety
// `q` must be a live handle; `out` must be writable.
enum QmutStatus qmut_quiver_to_json(const struct QmutQuiver *q, char **out);

// # Safety
// `q` must be a live handle; `out` must be writable.
enum QmutStatus qmut_quiver_rank(const struct QmutQuiver *q, size_t *out);

// Approximate value of b[i][j] (positive for an arrow i -> j).
//
// # Safety
// `q` must be a live handle; `out` must be writable.
enum QmutStatus qmut_quiver_weight(const struct QmutQuiver *q, size_t i, size_t j, double *out);

// Label m/d of the arrow between i and j, whichever its direction. Fails with
// `InvalidArgument` when there is no arrow or the weight has no label.
//
// # Safety
// `q` must be a live handle; `num` and `den` must be writable.
enum QmutStatus qmut_quiver_label(const struct QmutQuiver *q,
                                  size_t i,
                                  size_t j,
                                  uint32_t *num,
                                  uint32_t *den);

// Mutation at a vertex; the input is left unchanged.
//
// # Safety
// `q` must be a live handle; `out` must be writable.
enum QmutStatus qmut_quiver_mutate(const struct QmutQuiver *q, size_t v, struct QmutQuiver **out);

// Applies `len` mutations in order.
//
// # Safety
// `q` must be a live handle; `seq` must point to `len` values (or be null when
// `len` is 0); `out` must be writable.
enum QmutStatus qmut_quiver_mutate_seq(const struct QmutQuiver *q,
                                       const size_t *seq,
                                       size_t len,
                                       struct QmutQuiver **out);

// Whether the two quivers are isomorphic (or anti-isomorphic, with `mod_opposite`).
//
// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum QmutStatus qmut_quiver_isomorphic(const struct QmutQuiver *a,
                                       const struct QmutQuiver *b,
                                       bool mod_opposite,
                                       bool *out);

// Explores the mutation class. `size` receives the number of classes reached
// (the class size when the verdict is finite).
//
// # Safety
// `q` must be a live handle; `verdict` and `size` must be writable.
enum QmutStatus qmut_explore(const struct QmutQuiver *q,
                             size_t max_nodes,
                             bool mod_opposite,
                             enum QmutVerdict *verdict,
                             size_t *size);

// Explores the mutation class and returns the full JSON report.
//
// # Safety
// `q` must be a live handle; `out` must be writable.
enum QmutStatus qmut_explore_json(const struct QmutQuiver *q,
                                  size_t max_nodes,
                                  bool mod_opposite,
                                  char **out);

// Rank-3 finiteness decision.
//
// # Safety
// `q` must be a live handle; `finite` must be writable.
enum QmutStatus qmut_classify_rank3(const struct QmutQuiver *q, bool *finite);

// Mutation sequence (JSON array of 1-based vertices) from `a` to a quiver
// isomorphic to `b`; `NoPath` when none exists within `max_depth` steps.
//
// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum QmutStatus qmut_find_mutation_path(const struct QmutQuiver *a,
                                        const struct QmutQuiver *b,
                                        size_t max_depth,
                                        char **out);

// Initial realization of an acyclic or double-arrow-shaped quiver.
//
// # Safety
// `q` must be a live handle; `out` must be writable.
enum QmutStatus qmut_realization_initial(const struct QmutQuiver *q, struct QmutRealization **out);

// Partial reflection at `v` of a realization compatible with `q`.
//
// # Safety
// `r` and `q` must be live handles; `out` must be writable.
enum QmutStatus qmut_realization_mutate(const struct QmutRealization *r,
                                        const struct QmutQuiver *q,
                                        size_t v,
                                        struct QmutRealization **out);

// Dimension of the kernel of the Gram form.
//
// # Safety
// `r` must be a live handle; `out` must be writable.
enum QmutStatus qmut_realization_corank(const struct QmutRealization *r, size_t *out);

// Whether the realization is compatible with `q` and admissible.
//
// # Safety
// `r` and `q` must be live handles; `out` must be writable.
enum QmutStatus qmut_realization_is_admissible(const struct QmutRealization *r,
                                               const struct QmutQuiver *q,
                                               bool *out);

// Gram matrix as a JSON document.
//
// # Safety
// `r` must be a live handle; `out` must be writable.
enum QmutStatus qmut_realization_to_json(const struct QmutRealization *r, char **out);

// # Safety
// `r` must be null or a handle from this library that was not freed yet.
void qmut_realization_free(struct QmutRealization *r);

// Propagates a realization through the class and returns the JSON report.
// Succeeds whether or not violations were found; see the `holds` field.
//
// # Safety
// `q` must be a live handle; `out` must be writable.
enum QmutStatus qmut_verify_class_realization(const struct QmutQuiver *q,
                                              size_t max_nodes,
                                              char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QMUT_H */

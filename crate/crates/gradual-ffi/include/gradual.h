#ifndef GRADUAL_H
#define GRADUAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GrStatus {
  GR_STATUS_OK = 0,
  GR_STATUS_NULL_POINTER = 1,
  GR_STATUS_INVALID_ARGUMENT = 2,
  GR_STATUS_DATA_ERROR = 3,
  GR_STATUS_PRECONDITION = 4,
  GR_STATUS_GUARANTEE_VIOLATED = 5,
  GR_STATUS_INTERNAL = 6,
} GrStatus;

/*
 A mutable host graph.
 */
typedef struct GrGraph GrGraph;

/*
 A planned phase script.
 */
typedef struct GrScript GrScript;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Last error message of this thread, or null. Valid until the next call
 into this library on the same thread.
 */
const char *gr_last_error_message(void);

struct GrGraph *gr_graph_new(void);

/*
 # Safety
 `g` must be null or a pointer from [`gr_graph_new`] not yet freed.
 */
void gr_graph_free(struct GrGraph *g);

/*
 # Safety
 `g` must be a live graph handle.
 */
enum GrStatus gr_graph_add_edge(struct GrGraph *g, uint32_t u, uint32_t v, double w);

/*
 # Safety
 `g` must be a live graph handle.
 */
enum GrStatus gr_graph_remove_edge(struct GrGraph *g, uint32_t u, uint32_t v);

/*
 Number of edges, or 0 for a null handle.

 # Safety
 `g` must be null or a live graph handle.
 */
size_t gr_graph_edge_count(const struct GrGraph *g);

/*
 Plans a maximum-cardinality matching transformation.

 # Safety
 `g` must be a live graph handle, the pair arrays must hold `2 * len`
 values (or be null with `len == 0`), and `out` must be writable.
 */
enum GrStatus gr_plan_mcm(const struct GrGraph *g,
                          const uint32_t *from,
                          size_t from_len,
                          const uint32_t *to,
                          size_t to_len,
                          struct GrScript **out);

/*
 Plans a maximum-weight matching transformation with accuracy `epsilon`.

 # Safety
 As for [`gr_plan_mcm`].
 */
enum GrStatus gr_plan_mwm(const struct GrGraph *g,
                          const uint32_t *from,
                          size_t from_len,
                          const uint32_t *to,
                          size_t to_len,
                          double epsilon,
                          struct GrScript **out);

/*
 Plans a minimum spanning forest transformation.

 # Safety
 As for [`gr_plan_mcm`].
 */
enum GrStatus gr_plan_msf(const struct GrGraph *g,
                          const uint32_t *from,
                          size_t from_len,
                          const uint32_t *to,
                          size_t to_len,
                          struct GrScript **out);

/*
 # Safety
 `s` must be null or a live script handle.
 */
size_t gr_script_phase_count(const struct GrScript *s);

/*
 # Safety
 `s` must be null or a live script handle.
 */
size_t gr_script_op_count(const struct GrScript *s);

/*
 # Safety
 `s` must be null or a live script handle.
 */
size_t gr_script_budget(const struct GrScript *s);

/*
 Writes a newly allocated JSON string to `out`; free it with [`gr_string_free`].

 # Safety
 `s` must be a live script handle and `out` writable.
 */
enum GrStatus gr_script_to_json(const struct GrScript *s, char **out);

/*
 # Safety
 `p` must be null or a string from [`gr_script_to_json`] not yet freed.
 */
void gr_string_free(char *p);

/*
 Replays `s` from `from` and checks its guarantee and that it reaches `to`.
 Returns `Ok` on success and `GuaranteeViolated` otherwise.

 # Safety
 As for [`gr_plan_mcm`], with `s` a live script handle.
 */
enum GrStatus gr_script_check(const struct GrGraph *g,
                              const uint32_t *from,
                              size_t from_len,
                              const uint32_t *to,
                              size_t to_len,
                              const struct GrScript *s);

/*
 # Safety
 `s` must be null or a live script handle.
 */
void gr_script_free(struct GrScript *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRADUAL_H */

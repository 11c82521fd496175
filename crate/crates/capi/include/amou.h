#ifndef AMOU_H
#define AMOU_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum AmouStatus {
  AMOU_STATUS_OK = 0,
  /**
   * Null pointer, malformed UTF-8 or JSON, or failed validation.
   */
  AMOU_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Numerical failure (non-Hermitian input, eigensolver divergence, ...).
   */
  AMOU_STATUS_NUMERIC = 2,
  /**
   * A documented precondition of the operation was not met.
   */
  AMOU_STATUS_PRECONDITION = 3,
  /**
   * Membership/projection query answered negatively where a positive
   * answer was required.
   */
  AMOU_STATUS_NOT_MEMBER = 4,
} AmouStatus;

/**
 * Opaque element handle (element + its space).
 */
typedef struct AmouElement AmouElement;

/**
 * Opaque homomorphism handle.
 */
typedef struct AmouHom AmouHom;

/**
 * Opaque space handle.
 */
typedef struct AmouSpace AmouSpace;

/**
 * Last error message for this thread, or NULL if none was recorded.
 * The caller owns the returned string.
 */
char *amou_last_error_message(void);

/**
 * Release a string allocated by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by this library, or NULL.
 */
void amou_string_free(char *s);

/**
 * Build a space handle from `{"summands":[..]}` JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum AmouStatus amou_space_new_json(const char *json, struct AmouSpace **out);

/**
 * # Safety
 * `space` must come from `amou_space_new_json`, or be NULL.
 */
void amou_space_free(struct AmouSpace *space);

/**
 * Build an element handle from `{"level":[l,m],"blocks":[..]}` JSON
 * over the given space.
 *
 * # Safety
 * `space` must be a live space handle; `json` a NUL-terminated string;
 * `out` a valid pointer.
 */
enum AmouStatus amou_element_new_json(const struct AmouSpace *space,
                                      const char *json,
                                      struct AmouElement **out);

/**
 * Serialize an element back to its JSON wire form. Caller owns the string.
 *
 * # Safety
 * `elem` must be a live element handle.
 */
char *amou_element_to_json(const struct AmouElement *elem);

/**
 * # Safety
 * `elem` must come from this library, or be NULL.
 */
void amou_element_free(struct AmouElement *elem);

/**
 * |x| = √(x*x) as a new element handle.
 *
 * # Safety
 * `x` must be a live element handle; `out` a valid pointer.
 */
enum AmouStatus amou_element_abs(const struct AmouElement *x, struct AmouElement **out);

/**
 * Order-unit norm of an element.
 *
 * # Safety
 * `x` must be a live element handle; `out` a valid pointer.
 */
enum AmouStatus amou_element_order_unit_norm(const struct AmouElement *x, double *out);

/**
 * Whether p is an order projection (1) or not (0).
 *
 * # Safety
 * `p` must be a live element handle; `out` a valid pointer.
 */
enum AmouStatus amou_is_order_projection(const struct AmouElement *p, int32_t *out);

/**
 * Membership of y in the hereditary ideal of x (positive, unit-norm,
 * level 1). On membership, `min_epsilon` receives the minimal ε of the
 * block certificate; otherwise the status is `NotMember`.
 *
 * # Safety
 * `x` and `y` must be live element handles; `min_epsilon` a valid pointer.
 */
enum AmouStatus amou_ideal_min_epsilon(const struct AmouElement *x,
                                       const struct AmouElement *y,
                                       double *min_epsilon);

/**
 * Deterministic refuter for the absolute order unit property of a
 * positive unit-norm level-1 x. Returns `Ok` with the witness and its ε
 * if x is not an order projection, `NotMember` if no counterexample
 * exists (x is an order projection).
 *
 * # Safety
 * `x` must be a live element handle; `witness` and `epsilon` valid pointers.
 */
enum AmouStatus amou_construct_counterexample(const struct AmouElement *x,
                                              struct AmouElement **witness,
                                              double *epsilon);

/**
 * Build a homomorphism handle from
 * `{"source":[..],"target":[..],"mult":[[..]]}` JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` a valid pointer.
 */
enum AmouStatus amou_hom_new_json(const char *json, struct AmouHom **out);

/**
 * # Safety
 * `hom` must come from `amou_hom_new_json`, or be NULL.
 */
void amou_hom_free(struct AmouHom *hom);

/**
 * Apply a homomorphism; the result lives over the hom's target space.
 *
 * # Safety
 * `hom` and `x` must be live handles; `out` a valid pointer.
 */
enum AmouStatus amou_hom_apply(const struct AmouHom *hom,
                               const struct AmouElement *x,
                               struct AmouElement **out);

/**
 * K₀ class of a formal difference of projections, as `{"diff":[..]}`
 * JSON. Caller owns the string; NULL on error.
 *
 * # Safety
 * `p` and `q` must be live element handles over the same space.
 */
char *amou_k0_class_json(const struct AmouElement *p, const struct AmouElement *q);

#endif /* AMOU_H */

#ifndef CATLOC_H
#define CATLOC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum {
  CATLOC_STATUS_OK = 0,
  CATLOC_STATUS_NULL_ARGUMENT = 1,
  CATLOC_STATUS_INVALID_UTF8 = 2,
  CATLOC_STATUS_PARSE_ERROR = 3,
  CATLOC_STATUS_UNRESOLVED_REFERENCE = 4,
  CATLOC_STATUS_INVALID_INPUT = 5,
  CATLOC_STATUS_BUDGET_EXCEEDED = 6,
  CATLOC_STATUS_PRECONDITION_VIOLATED = 7,
  CATLOC_STATUS_NOT_INVERTING = 8,
  CATLOC_STATUS_IO_ERROR = 9,
  /**
   * The question was well-posed but stayed undecided within budget.
   */
  CATLOC_STATUS_UNDECIDED = 10,
} CatlocStatus;

/**
 * A parsed and resolved document. Opaque.
 */
typedef struct CatlocDocument CatlocDocument;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse and resolve a document. On success `*out` owns the handle; release
 * it with `catloc_document_free`.
 *
 * # Safety
 * `text` must be a valid nul-terminated string; `out` must be a valid
 * pointer.
 */
CatlocStatus catloc_document_parse(const char *text, CatlocDocument **out);

/**
 * # Safety
 * `doc` must be NULL or a handle from `catloc_document_parse`, not yet
 * freed.
 */
void catloc_document_free(CatlocDocument *doc);

/**
 * Canonical text of the document; parses back to the same document.
 *
 * # Safety
 * `doc` must be a live handle.
 */
char *catloc_document_print(const CatlocDocument *doc);

/**
 * JSON rendering of the document structure.
 *
 * # Safety
 * `doc` must be a live handle.
 */
char *catloc_document_to_json(const CatlocDocument *doc);

/**
 * # Safety
 * `s` must be NULL or a string previously returned by this library.
 */
void catloc_string_free(char *s);

/**
 * The message of the most recent failure on this thread, or NULL.
 */
char *catloc_last_error_message(void);

/**
 * Run one hypothesis set (`t0`, `c2`, `c1`, `riou`, `p3`, `referee`, `p1`,
 * `p2`, `tu0`, `t1v`) against a setup of the document. `setup` may be NULL
 * when the document declares exactly one. `object` names an object of C
 * (required by `c1`); `selector` and `replacement` name declared blocks
 * (optional for `p1`, required for `t1v`). On success `*out_json` holds a
 * JSON array of {id, status, witness} rows.
 *
 * # Safety
 * Pointer arguments must be NULL or valid; `doc` must be a live handle.
 */
CatlocStatus catloc_check(const CatlocDocument *doc,
                          const char *setup,
                          const char *hypothesis,
                          const char *object,
                          const char *selector,
                          const char *replacement,
                          char **out_json);

/**
 * Decide whether the induced functor on the localised models is an
 * equivalence. `*out_verdict`: 0 equivalence, 1 not an equivalence,
 * 2 undecided. `*out_witness` carries the witness or reason (may be NULL).
 *
 * # Safety
 * Pointer arguments must be NULL or valid; `doc` must be a live handle.
 */
CatlocStatus catloc_equivalence(const CatlocDocument *doc,
                                const char *setup,
                                int32_t *out_verdict,
                                char **out_witness);

/**
 * Compute a finite model of the localisation of a declared class's carrier
 * at that class. On success the model sizes land in the out-parameters.
 * Returns `Undecided` when no finite model was reached within budget.
 *
 * # Safety
 * Pointer arguments must be NULL or valid; `doc` must be a live handle.
 */
CatlocStatus catloc_localize(const CatlocDocument *doc,
                             const char *class_,
                             uint64_t *out_objects,
                             uint64_t *out_morphisms);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CATLOC_H */

#ifndef FOLIA_H
#define FOLIA_H

#include <stddef.h>
#include <stdint.h>

typedef enum FoliaStatus {
  FOLIA_STATUS_OK = 0,
  FOLIA_STATUS_NULL_POINTER = 1,
  FOLIA_STATUS_INVALID_UTF8 = 2,
  FOLIA_STATUS_PARSE = 3,
  FOLIA_STATUS_INVALID_ARGUMENT = 4,
  FOLIA_STATUS_COMPUTATION = 5,
  FOLIA_STATUS_NOT_FOUND = 6,
  FOLIA_STATUS_PANIC = 7,
} FoliaStatus;

typedef enum FoliaTheorem {
  FOLIA_THEOREM_THM1 = 0,
  FOLIA_THEOREM_THM2A = 1,
  FOLIA_THEOREM_THM2B = 2,
  FOLIA_THEOREM_THM4 = 3,
  FOLIA_THEOREM_DEGREE_NODAL = 4,
  FOLIA_THEOREM_DEGREE_NONDICRITICAL = 5,
} FoliaTheorem;

/*
 A planar polynomial vector field.
 */
typedef struct FoliaField FoliaField;

/*
 A projective one-form `P dX + Q dY + R dZ`.
 */
typedef struct FoliaForm FoliaForm;

/*
 A polynomial in `x, y` or `X, Y, Z` with Gaussian-rational coefficients.
 */
typedef struct FoliaPoly FoliaPoly;

/*
 Message for the last failed call on this thread, or NULL. Valid until
 the next call into the library.
 */
const char *folia_last_error(void);

/*
 # Safety
 `s` must come from this library or be NULL.
 */
void folia_string_free(char *s);

/*
 Parses `text`; `projective` selects `X, Y, Z` over `x, y`.

 # Safety
 `text` must be a NUL-terminated string and `out` writable.
 */
enum FoliaStatus folia_poly_parse(const char *text, int projective, struct FoliaPoly **out);

/*
 Canonical text of a polynomial.

 # Safety
 `p` must be a live handle and `out` writable.
 */
enum FoliaStatus folia_poly_print(const struct FoliaPoly *p, char **out);

/*
 Total degree, or -1 for the zero polynomial.

 # Safety
 `p` must be a live handle.
 */
enum FoliaStatus folia_poly_degree(const struct FoliaPoly *p, int *out);

/*
 # Safety
 `p` must come from this library or be NULL.
 */
void folia_poly_free(struct FoliaPoly *p);

/*
 The field `x' = p, y' = q`.

 # Safety
 `p` and `q` must be live handles and `out` writable.
 */
enum FoliaStatus folia_field_new(const struct FoliaPoly *p,
                                 const struct FoliaPoly *q,
                                 struct FoliaField **out);

/*
 The `[field name]` section of a `.fol` document.

 # Safety
 `text` and `name` must be NUL-terminated strings and `out` writable.
 */
enum FoliaStatus folia_field_from_document(const char *text,
                                           const char *name,
                                           struct FoliaField **out);

/*
 # Safety
 `f` must come from this library or be NULL.
 */
void folia_field_free(struct FoliaField *f);

/*
 Exact test of `Xf = K f`. On success `*invariant` is 0 or 1; when it is
 1 and `cofactor` is non-NULL the cofactor handle is written there.

 # Safety
 Handles must be live and `invariant` writable; `cofactor` may be NULL.
 */
enum FoliaStatus folia_check_invariant(const struct FoliaField *field,
                                       const struct FoliaPoly *curve,
                                       int *invariant,
                                       struct FoliaPoly **cofactor);

/*
 Exact test of `XV = div(X) V`.

 # Safety
 Handles must be live and `out` writable.
 */
enum FoliaStatus folia_iif_check(const struct FoliaField *field,
                                 const struct FoliaPoly *v,
                                 int *out);

/*
 Saturated projective one-form of a field.

 # Safety
 `field` must be live and `out` writable.
 */
enum FoliaStatus folia_projectivize(const struct FoliaField *field, struct FoliaForm **out);

/*
 Degree of the foliation.

 # Safety
 `form` must be live and `out` writable.
 */
enum FoliaStatus folia_form_degree(const struct FoliaForm *form, uint32_t *out);

/*
 Coefficient `index` (0 = P, 1 = Q, 2 = R) as a new polynomial handle.

 # Safety
 `form` must be live and `out` writable.
 */
enum FoliaStatus folia_form_coefficient(const struct FoliaForm *form,
                                        uint32_t index,
                                        struct FoliaPoly **out);

/*
 # Safety
 `form` must come from this library or be NULL.
 */
void folia_form_free(struct FoliaForm *form);

/*
 Real ovals of an affine curve in its default box.

 # Safety
 `curve` must be live; `count` and `certified` writable.
 */
enum FoliaStatus folia_count_ovals(const struct FoliaPoly *curve,
                                   uint32_t resolution,
                                   uintptr_t *count,
                                   uintptr_t *certified);

/*
 Closed-form bound for a foliation degree `m`.

 # Safety
 `out` must be writable.
 */
enum FoliaStatus folia_bound(enum FoliaTheorem theorem, uint32_t m, uint64_t *out);

#endif  /* FOLIA_H */

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef OVOID_H
#define OVOID_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum {
  OVOID_STATUS_OK = 0,
  OVOID_STATUS_NULL_POINTER = 1,
  OVOID_STATUS_INVALID_ARGUMENT = 2,
  OVOID_STATUS_FIELD = 3,
  OVOID_STATUS_GEOMETRY = 4,
  OVOID_STATUS_MODEL = 5,
  OVOID_STATUS_NOT_PARTIAL_OVOID = 6,
  OVOID_STATUS_REDEI = 7,
  OVOID_STATUS_CONFIG = 8,
  OVOID_STATUS_UNSUPPORTED = 9,
  OVOID_STATUS_REFERENCE = 10,
  OVOID_STATUS_IO = 11,
  // A search ended without a set (exhausted or out of time).
  OVOID_STATUS_NOT_FOUND = 12,
  OVOID_STATUS_PANIC = 13,
} OvoidStatus;

typedef enum {
  OVOID_MODEL_KIND_Q4 = 0,
  OVOID_MODEL_KIND_T2 = 1,
} OvoidModelKind;

typedef enum {
  // Point-level exact search.
  OVOID_SEARCH_MODE_EXACT = 0,
  // Antipodal pairs off the section `X0 = 0`; Q(4,q) only.
  OVOID_SEARCH_MODE_PAIRS = 1,
  // Seeded random greedy completion.
  OVOID_SEARCH_MODE_RANDOM = 2,
} OvoidSearchMode;

typedef struct OvoidField OvoidField;

typedef struct OvoidModel OvoidModel;

typedef struct OvoidPartialOvoid OvoidPartialOvoid;

// Search parameters; see [`ovoid_search_options_default`].
typedef struct {
  // 0 means q^2 - 1.
  size_t target;
  OvoidSearchMode mode;
  uint64_t seed;
  // 0 uses all cores, 1 runs inline.
  size_t threads;
  // Seconds; zero or negative means unbounded.
  double budget_secs;
} OvoidSearchOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *ovoid_last_error(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must come from this library and not be freed twice.
void ovoid_string_free(char *s);

// GF(q) for an odd prime power `q`.
//
// # Safety
// `out` must be valid for one pointer write.
OvoidStatus ovoid_field_new(uint32_t q, OvoidField **out);

// # Safety
// `field` must come from [`ovoid_field_new`] (or be null).
void ovoid_field_free(OvoidField *field);

// Field order, or 0 for a null handle.
//
// # Safety
// `field` must be a live handle or null.
uint32_t ovoid_field_order(const OvoidField *field);

// Sum of two encoded elements.
//
// # Safety
// `field` must be a live handle; `out` valid for one write.
OvoidStatus ovoid_field_add(const OvoidField *field, uint32_t a, uint32_t b, uint32_t *out);

// Product of two encoded elements.
//
// # Safety
// As [`ovoid_field_add`].
OvoidStatus ovoid_field_mul(const OvoidField *field, uint32_t a, uint32_t b, uint32_t *out);

// Quotient; division by zero fails with `Field`.
//
// # Safety
// As [`ovoid_field_add`].
OvoidStatus ovoid_field_div(const OvoidField *field, uint32_t a, uint32_t b, uint32_t *out);

// Builds and verifies a model over `field`. Honors `OVOID_CACHE_DIR`.
//
// # Safety
// `field` must be a live handle; `out` valid for one pointer write.
OvoidStatus ovoid_model_new(const OvoidField *field, OvoidModelKind kind, OvoidModel **out);

// # Safety
// `model` must come from [`ovoid_model_new`] (or be null).
void ovoid_model_free(OvoidModel *model);

// Points, lines and order `(s, t)`.
//
// # Safety
// `model` must be a live handle; each output valid for one write.
OvoidStatus ovoid_model_counts(const OvoidModel *model,
                               size_t *points,
                               size_t *lines,
                               size_t *s,
                               size_t *t);

OvoidSearchOptions ovoid_search_options_default(void);

// Searches for a maximal partial ovoid. In T2(C) the exact search keeps
// `(∞)` in the set. Returns `NotFound` when the search ends empty-handed.
//
// # Safety
// `model` and `opts` must be live; `out` valid for one pointer write.
OvoidStatus ovoid_search(const OvoidModel *model,
                         const OvoidSearchOptions *opts,
                         OvoidPartialOvoid **out);

// A partial ovoid from point indices of `model`.
//
// # Safety
// `members` must point to `len` indices (or be null with `len == 0`).
OvoidStatus ovoid_partial_ovoid_new(const OvoidModel *model,
                                    const size_t *members,
                                    size_t len,
                                    OvoidPartialOvoid **out);

// # Safety
// `k` must come from this library (or be null).
void ovoid_partial_ovoid_free(OvoidPartialOvoid *k);

// Number of members, or 0 for a null handle.
//
// # Safety
// `k` must be a live handle or null.
size_t ovoid_partial_ovoid_len(const OvoidPartialOvoid *k);

// Copies up to `cap` sorted member indices into `buf`; returns the total
// member count.
//
// # Safety
// `buf` must have room for `cap` indices.
size_t ovoid_partial_ovoid_members(const OvoidPartialOvoid *k, size_t *buf, size_t cap);

// Whether no point extends `k`.
//
// # Safety
// Live handles; `out` valid for one write.
OvoidStatus ovoid_partial_ovoid_is_maximal(const OvoidModel *model,
                                           const OvoidPartialOvoid *k,
                                           bool *out);

// The partial ovoid in the JSON file format.
//
// # Safety
// Live handles; `out` valid for one pointer write.
OvoidStatus ovoid_partial_ovoid_to_json(const OvoidModel *model,
                                        const OvoidPartialOvoid *k,
                                        char **out);

// Parses the JSON file format against `model`.
//
// # Safety
// `json` must be a nul-terminated string.
OvoidStatus ovoid_partial_ovoid_from_json(const OvoidModel *model,
                                          const char *json,
                                          OvoidPartialOvoid **out);

// Verification report (maximality, subquadrangle, identity suite) as JSON.
//
// # Safety
// Live handles; `out` valid for one pointer write.
OvoidStatus ovoid_verify_json(const OvoidModel *model, const OvoidPartialOvoid *k, char **out);

// Elliptic-section census with its checks, as JSON.
//
// # Safety
// Live handles; `out` valid for one pointer write.
OvoidStatus ovoid_census_json(const OvoidModel *model, const OvoidPartialOvoid *k, char **out);

// Allowed residues mod p, as a JSON array. Prime q only.
//
// # Safety
// `out` valid for one pointer write.
OvoidStatus ovoid_residues_json(uint32_t q, char **out);

// Full search-verify-census run for prime q, as JSON. A reference
// mismatch still returns the report, with status `Reference`.
//
// # Safety
// `out` valid for one pointer write.
OvoidStatus ovoid_pipeline_json(uint32_t q, size_t threads, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OVOID_H */

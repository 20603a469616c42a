#ifndef TRAPTILE_H
#define TRAPTILE_H

/* Generated by cbindgen from the traptile-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Success.
#define TRAPTILE_OK 0

// A required pointer argument was null.
#define TRAPTILE_ERR_NULL_ARGUMENT 1

// A string argument did not parse (UTF-8 or number grammar).
#define TRAPTILE_ERR_PARSE 2

// Inputs violate a documented precondition.
#define TRAPTILE_ERR_DOMAIN 3

// A verification check ran and returned FAIL.
#define TRAPTILE_ERR_VERIFY_FAIL 4

// Construction exceeded the piece budget.
#define TRAPTILE_ERR_BUDGET 5

// Any other internal failure.
#define TRAPTILE_ERR_INTERNAL 6

// Field context handle; wraps the discriminant and number parsing rules.
typedef struct TraptileContext TraptileContext;

// Verified-geometry handle: a target figure plus scaled piece placements.
typedef struct TraptileTiling TraptileTiling;

// Returns the message for the most recent error on this thread, or null.
// The pointer stays valid until the next failing call on the same thread.
const char *traptile_last_error(void);

// Creates a field context for Q[sqrt(d)]; `d` is a rational string such as
// "2" or "5/4" and must be positive and not a perfect square.
//
// # Safety
// `d` must be a valid NUL-terminated C string; `status` may be null.
struct TraptileContext *traptile_context_new(const char *d, int32_t *status);

// # Safety
// `ctx` must be null or a pointer from [`traptile_context_new`], not yet freed.
void traptile_context_free(struct TraptileContext *ctx);

// Builds a verified-by-construction tiling of t(b) by homotheties of t(a);
// both midlines are rational strings greater than 1.
//
// # Safety
// `ctx` must be a live context handle; `a` and `b` valid C strings;
// `status` may be null.
struct TraptileTiling *traptile_tile_rational(const struct TraptileContext *ctx,
                                              const char *a,
                                              const char *b,
                                              int32_t *status);

// Builds a verified tiling of t(c) by homotheties of t(a) and t(b); the
// midlines are quadratic strings such as "3+1*sqrt(2)".
//
// # Safety
// Same contract as [`traptile_tile_rational`], plus `c`.
struct TraptileTiling *traptile_tile_quadratic(const struct TraptileContext *ctx,
                                               const char *a,
                                               const char *b,
                                               const char *c,
                                               int32_t *status);

// Parses a tiling from its JSON file format.
//
// # Safety
// `json` must be a valid C string; `status` may be null.
struct TraptileTiling *traptile_tiling_from_json(const char *json, int32_t *status);

// # Safety
// `tiling` must be null or a live tiling handle, not yet freed.
void traptile_tiling_free(struct TraptileTiling *tiling);

// Number of piece placements.
//
// # Safety
// `tiling` must be null or a live tiling handle.
size_t traptile_piece_count(const struct TraptileTiling *tiling);

// Re-runs the exact boundary-cancellation check. Returns `TRAPTILE_OK`,
// `TRAPTILE_ERR_VERIFY_FAIL` (with the residue in the error message), or an
// error code for malformed handles.
//
// # Safety
// `tiling` must be a live tiling handle.
int32_t traptile_verify(const struct TraptileTiling *tiling);

// Runs the electrical-network check and returns its report as JSON.
// Writes `TRAPTILE_OK` when the network is consistent with a tiling,
// `TRAPTILE_ERR_VERIFY_FAIL` otherwise.
//
// # Safety
// `tiling` must be a live tiling handle; `status` may be null.
char *traptile_kenyon_report(const struct TraptileTiling *tiling, int32_t *status);

// Serializes the tiling to its JSON file format.
//
// # Safety
// `tiling` must be a live tiling handle; `status` may be null.
char *traptile_tiling_to_json(const struct TraptileTiling *tiling, int32_t *status);

// Renders the tiling as an SVG document.
//
// # Safety
// `tiling` must be a live tiling handle; `status` may be null.
char *traptile_tiling_to_svg(const struct TraptileTiling *tiling, int32_t *status);

// Evaluates the necessary tileability conditions for candidate midline `b`
// against prototile midline `a`; returns the report as JSON.
//
// # Safety
// `ctx` must be a live context handle; `a`, `b` valid C strings; `status`
// may be null.
char *traptile_check_conditions(const struct TraptileContext *ctx,
                                const char *a,
                                const char *b,
                                int32_t *status);

// Releases a string returned by any `*_to_json`, `*_to_svg`, or report
// function.
//
// # Safety
// `s` must be null or a string pointer returned by this library, not yet
// freed.
void traptile_string_free(char *s);

#endif  /* TRAPTILE_H */

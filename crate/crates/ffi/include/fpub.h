#ifndef FPUB_H
#define FPUB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every function.
 */
typedef enum FpStatus {
  FP_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  FP_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  FP_STATUS_INVALID_UTF8 = 2,
  /**
   * The input is not well-formed TriG.
   */
  FP_STATUS_SYNTAX = 3,
  /**
   * The nanopublication breaks a structural rule.
   */
  FP_STATUS_VALIDATION_FAILED = 4,
  /**
   * The artifact code does not match the content, or there is none.
   */
  FP_STATUS_VERIFY_FAILED = 5,
  FP_STATUS_NOT_FOUND = 6,
  /**
   * A parameter, IRI or query argument was rejected.
   */
  FP_STATUS_INVALID_PARAMETER = 7,
  /**
   * A workflow rule was broken.
   */
  FP_STATUS_WORKFLOW = 8,
  FP_STATUS_IO = 9,
  /**
   * An internal error; the store handle should be closed.
   */
  FP_STATUS_PANIC = 10,
} FpStatus;

/**
 * An open store. Safe to share between threads.
 */
typedef struct FpStore FpStore;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *fp_version(void);

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next call into the library on the same thread.
 */
const char *fp_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void fp_string_free(char *s);

/**
 * Opens or creates the store at `path`.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out` must be writable.
 */
enum FpStatus fp_store_open(const char *path, struct FpStore **out);

/**
 * Closes a store. Null is ignored.
 *
 * # Safety
 * `store` must come from [`fp_store_open`] and not have been closed.
 */
void fp_store_close(struct FpStore *store);

/**
 * Publishes TriG text. A draft under the temporary IRI is finalized
 * first; a finalized nanopublication is stored byte for byte. Writes the
 * artifact code to `out_code`.
 *
 * # Safety
 * Pointers must be valid; `out_code` receives a string to free.
 */
enum FpStatus fp_store_publish(const struct FpStore *store, const char *trig, char **out_code);

/**
 * The published TriG of `code` (an artifact code or its IRI).
 *
 * # Safety
 * Pointers must be valid; `out_trig` receives a string to free.
 */
enum FpStatus fp_store_fetch(const struct FpStore *store, const char *code, char **out_trig);

/**
 * Thread status (`draft`, `submitted`, `under-review`, `revised`,
 * `decided`) of a submission or formalization.
 *
 * # Safety
 * Pointers must be valid; `out_status` receives a string to free.
 */
enum FpStatus fp_store_status(const struct FpStore *store, const char *target, char **out_status);

/**
 * Per-type counts for a venue as JSON.
 *
 * # Safety
 * Pointers must be valid; `out_json` receives a string to free.
 */
enum FpStatus fp_store_stats(const struct FpStore *store, const char *venue, char **out_json);

/**
 * The venue's thread graph as `dot` or `json`.
 *
 * # Safety
 * Pointers must be valid; `out` receives a string to free.
 */
enum FpStatus fp_store_graph(const struct FpStore *store,
                             const char *venue,
                             const char *format,
                             char **out);

/**
 * Runs a named query. `params_json` is a JSON object of string values, or
 * null for none. The result is JSON with `columns` and `rows`.
 *
 * # Safety
 * Pointers must be valid; `out_json` receives a string to free.
 */
enum FpStatus fp_store_query(const struct FpStore *store,
                             const char *name,
                             const char *params_json,
                             char **out_json);

/**
 * Link-integrity findings over the whole store as a JSON array.
 *
 * # Safety
 * Pointers must be valid; `out_json` receives a string to free.
 */
enum FpStatus fp_store_integrity(const struct FpStore *store, char **out_json);

/**
 * Checks a finalized nanopublication: well-formed, valid, and its artifact
 * code matches. Writes the code on success.
 *
 * # Safety
 * Pointers must be valid; `out_code` receives a string to free.
 */
enum FpStatus fp_verify(const char *trig, char **out_code);

/**
 * Finalizes a draft under the temporary IRI, writing the final TriG and
 * its artifact code.
 *
 * # Safety
 * Pointers must be valid; both outputs receive strings to free.
 */
enum FpStatus fp_finalize(const char *trig, char **out_trig, char **out_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FPUB_H */

#ifndef COINMIRROR_H
#define COINMIRROR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CmStatus {
  CM_STATUS_OK = 0,
  CM_STATUS_NULL_POINTER = 1,
  CM_STATUS_INVALID_ARGUMENT = 2,
  CM_STATUS_CONFIG = 3,
  CM_STATUS_IO = 4,
  CM_STATUS_INSUFFICIENT_DATA = 5,
  CM_STATUS_UNDEFINED = 6,
  CM_STATUS_INTERNAL = 7,
} CmStatus;

/**
 * Weighted directed communication graph.
 */
typedef struct CmGraph CmGraph;

/**
 * Parsed messages.
 */
typedef struct CmMessageSet CmMessageSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cm_version(void);

/**
 * Message of the last failure on this thread, or NULL. Valid until the
 * next library call on this thread.
 */
const char *cm_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed once.
 */
void cm_string_free(char *s);

/**
 * Parses an mbox file into a new message set.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum CmStatus cm_messages_from_mbox(const char *path, struct CmMessageSet **out);

/**
 * Parses a message CSV into a new message set.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum CmStatus cm_messages_from_csv(const char *path, struct CmMessageSet **out);

/**
 * # Safety
 * `ms` must be a live handle; `out` writable.
 */
enum CmStatus cm_messages_len(const struct CmMessageSet *ms, size_t *out);

/**
 * Count of input problems recorded while parsing (skipped or repaired
 * messages).
 *
 * # Safety
 * `ms` must be a live handle; `out` writable.
 */
enum CmStatus cm_messages_warning_count(const struct CmMessageSet *ms, uint64_t *out);

/**
 * # Safety
 * `ms` must be NULL or a handle from this library, freed once.
 */
void cm_messages_free(struct CmMessageSet *ms);

/**
 * New empty graph.
 */
struct CmGraph *cm_graph_new(void);

/**
 * Graph of every message in the set over its whole time span.
 *
 * # Safety
 * `ms` must be a live handle; `out` writable.
 */
enum CmStatus cm_graph_from_messages(const struct CmMessageSet *ms, struct CmGraph **out);

/**
 * Adds `weight` messages from `src` to `dst`. Addresses are normalized;
 * self-loops are ignored.
 *
 * # Safety
 * `g` must be a live handle; `src` and `dst` NUL-terminated strings.
 */
enum CmStatus cm_graph_add_edge(struct CmGraph *g,
                                const char *src,
                                const char *dst,
                                uint64_t weight);

/**
 * # Safety
 * `g` must be a live handle; `out` writable.
 */
enum CmStatus cm_graph_node_count(const struct CmGraph *g, size_t *out);

/**
 * Betweenness of one actor. Unknown actors score 0.
 *
 * # Safety
 * `g` must be a live handle; `actor` a NUL-terminated string; `out`
 * writable.
 */
enum CmStatus cm_graph_betweenness(const struct CmGraph *g,
                                   const char *actor,
                                   bool normalized,
                                   bool directed,
                                   double *out);

/**
 * # Safety
 * `g` must be NULL or a handle from this library, freed once.
 */
void cm_graph_free(struct CmGraph *g);

/**
 * Pearson r of two samples and its two-tailed p-value. `out_p` may be
 * NULL.
 *
 * # Safety
 * `xs` and `ys` must point to `n` doubles each; `out_r` writable.
 */
enum CmStatus cm_pearson(const double *xs,
                         const double *ys,
                         size_t n,
                         double *out_r,
                         double *out_p);

/**
 * Two-tailed p-value for correlation `r` over `n` samples.
 *
 * # Safety
 * `out` must be writable.
 */
enum CmStatus cm_two_tailed_p(double r, size_t n, double *out);

/**
 * (sent − received) / (sent + received); `Undefined` when both are 0.
 *
 * # Safety
 * `out` must be writable.
 */
enum CmStatus cm_contribution_index(uint64_t sent, uint64_t received, double *out);

/**
 * Correlation table of a team metrics CSV as aligned text. `columns` is a
 * comma-separated list, or NULL for every metric column. Free the result
 * with [`cm_string_free`].
 *
 * # Safety
 * `path` must be a NUL-terminated string, `columns` NULL or one, and
 * `out_text` writable.
 */
enum CmStatus cm_correlate_csv(const char *path, const char *columns, char **out_text);

/**
 * Runs the full analysis for a config file. `output_dir` overrides the
 * config's output directory when not NULL.
 *
 * # Safety
 * `config_path` must be a NUL-terminated string, `output_dir` NULL or one.
 */
enum CmStatus cm_analyze(const char *config_path, const char *output_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COINMIRROR_H */

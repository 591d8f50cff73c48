#ifndef WARNTRACK_H
#define WARNTRACK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WtApproach {
  WT_APPROACH_SOA = 0,
  WT_APPROACH_IMPROVED = 1,
} WtApproach;

typedef enum WtSide {
  WT_SIDE_PRE = 0,
  WT_SIDE_POST = 1,
} WtSide;

typedef enum WtStatus {
  WT_STATUS_OK = 0,
  WT_STATUS_NULL_ARGUMENT = 1,
  WT_STATUS_INVALID_UTF8 = 2,
  WT_STATUS_MALFORMED_REPORT = 3,
  WT_STATUS_SCHEMA_VIOLATION = 4,
  WT_STATUS_FILE_MISSING = 5,
  WT_STATUS_CONFIG = 6,
  WT_STATUS_IO = 7,
  WT_STATUS_INVALID_INPUT = 8,
  WT_STATUS_INTERNAL = 9,
  WT_STATUS_PANIC = 10,
} WtStatus;

/**
 * Parsed refactoring records.
 */
typedef struct WtRecords WtRecords;

/**
 * Result of tracking one commit pair.
 */
typedef struct WtReport WtReport;

/**
 * Warnings of one revision.
 */
typedef struct WtWarningSet WtWarningSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failed call on this thread, or null. The
 * pointer stays valid until the next `wt_*` call on the same thread.
 */
const char *wt_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *wt_version(void);

/**
 * Parses a warning report. `format` is `"spotbugs"`, `"pmd"` or
 * `"generic"`; `project` and `strip_prefix` may be null.
 *
 * # Safety
 * String arguments are null or NUL-terminated; `data` points to `len`
 * bytes; `out` is a valid pointer to write the result to.
 */
enum WtStatus wt_warning_set_parse(const char *format,
                                   const uint8_t *data,
                                   size_t len,
                                   enum WtSide side,
                                   const char *project,
                                   const char *strip_prefix,
                                   struct WtWarningSet **out);

/**
 * Number of warnings in a set; 0 for null.
 *
 * # Safety
 * `set` is null or a live pointer from [`wt_warning_set_parse`].
 */
size_t wt_warning_set_len(const struct WtWarningSet *set);

/**
 * # Safety
 * `set` is null or a pointer from [`wt_warning_set_parse`] not yet freed.
 */
void wt_warning_set_free(struct WtWarningSet *set);

/**
 * Parses refactoring records (flat list or RefactoringMiner JSON).
 *
 * # Safety
 * `data` points to `len` bytes; `out` is a valid pointer.
 */
enum WtStatus wt_records_parse(const uint8_t *data, size_t len, struct WtRecords **out);

/**
 * # Safety
 * `records` is null or a live pointer from [`wt_records_parse`].
 */
size_t wt_records_len(const struct WtRecords *records);

/**
 * # Safety
 * `records` is null or a pointer from [`wt_records_parse`] not yet freed.
 */
void wt_records_free(struct WtRecords *records);

/**
 * Tracks one commit pair. `records`, `config_toml` and the commit ids may
 * be null. The baseline approach ignores `records`.
 *
 * # Safety
 * `pre` and `post` are live warning sets; `records` is null or live;
 * strings are null or NUL-terminated; `out` is a valid pointer.
 */
enum WtStatus wt_track(enum WtApproach approach,
                       const struct WtWarningSet *pre,
                       const struct WtWarningSet *post,
                       const char *pre_root,
                       const char *post_root,
                       const struct WtRecords *records,
                       const char *config_toml,
                       const char *pre_commit,
                       const char *post_commit,
                       struct WtReport **out);

/**
 * Counts of each status in a report. Any output pointer may be null.
 *
 * # Safety
 * `report` is a live report; non-null outputs are writable.
 */
enum WtStatus wt_report_counts(const struct WtReport *report,
                               size_t *persistent,
                               size_t *resolved,
                               size_t *newly_introduced);

/**
 * Canonical JSON form of a report. Free the string with
 * [`wt_string_free`].
 *
 * # Safety
 * `report` is a live report; `out` is a valid pointer.
 */
enum WtStatus wt_report_to_json(const struct WtReport *report, char **out);

/**
 * # Safety
 * `report` is null or a pointer from [`wt_track`] not yet freed.
 */
void wt_report_free(struct WtReport *report);

/**
 * # Safety
 * `s` is null or a string returned by this library not yet freed.
 */
void wt_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WARNTRACK_H */

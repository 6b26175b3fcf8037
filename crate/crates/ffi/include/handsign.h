#ifndef HANDSIGN_H
#define HANDSIGN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum HsStatus {
  HS_STATUS_OK = 0,
  HS_STATUS_NULL_ARGUMENT = 1,
  HS_STATUS_INVALID_ARGUMENT = 2,
  HS_STATUS_INVALID_IMAGE = 3,
  HS_STATUS_INVALID_CONFIG = 4,
  HS_STATUS_INTERNAL = 5,
  HS_STATUS_PANIC = 6,
} HsStatus;

// Recognizer configuration shared by any number of calls and sessions.
typedef struct HsEngine HsEngine;

// Debounce state and metrics for one frame stream.
typedef struct HsSession HsSession;

// Per-frame outcome. Letters are ASCII capitals, or 0 for none.
typedef struct HsFrame {
  uint8_t letter;
  uint32_t defect_count;
  double angle_deg;
  uint8_t threshold;
  // Letter the session emitted on this frame; always 0 outside sessions.
  uint8_t stable_letter;
} HsFrame;

typedef struct HsMetrics {
  uint64_t frames_processed;
  uint64_t recognitions_emitted;
  // Actual output on the 7-second scale, NaN until the first emission.
  double a_o;
} HsMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *hs_version(void);

// Static description of a status code.
const char *hs_status_str(enum HsStatus status);

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *hs_last_error(void);

// Engine with the default configuration.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum HsStatus hs_engine_new(struct HsEngine **out);

// Engine from configuration text in the `key = value` format.
//
// # Safety
// `text` must point to `len` readable bytes; `out` must be writable.
enum HsStatus hs_engine_from_config(const uint8_t *text, size_t len, struct HsEngine **out);

// # Safety
// `engine` must be NULL or a handle from this library not yet freed.
void hs_engine_free(struct HsEngine *engine);

// Classify one 8-bit grayscale frame.
//
// # Safety
// `pixels` must cover `height` rows of `stride` bytes; `out` must be writable.
enum HsStatus hs_recognize(const struct HsEngine *engine,
                           const uint8_t *pixels,
                           uint32_t width,
                           uint32_t height,
                           uint32_t stride,
                           struct HsFrame *out);

// Classify a PGM or PNG file image and return the full result document as JSON.
//
// # Safety
// `bytes` must point to `len` readable bytes; `out_json` must be writable.
// The returned string must be released with [`hs_string_free`].
enum HsStatus hs_recognize_encoded_json(const struct HsEngine *engine,
                                        const uint8_t *bytes,
                                        size_t len,
                                        char **out_json);

// # Safety
// `s` must be NULL or a string returned by this library not yet freed.
void hs_string_free(char *s);

// Session emitting a letter after `window` identical consecutive frames (1 to 1000).
//
// # Safety
// `out` must be writable.
enum HsStatus hs_session_new(uint32_t window, struct HsSession **out);

// Classify a frame captured `t_seconds` after the session began and feed it
// to the debouncer. Runs the engine's letter hook when a letter is emitted.
//
// # Safety
// Handles must be live; `pixels` as for [`hs_recognize`]; `out` may be NULL.
enum HsStatus hs_session_push(struct HsSession *session,
                              const struct HsEngine *engine,
                              const uint8_t *pixels,
                              uint32_t width,
                              uint32_t height,
                              uint32_t stride,
                              double t_seconds,
                              struct HsFrame *out);

// # Safety
// `session` must be live; `out` must be writable.
enum HsStatus hs_session_metrics(const struct HsSession *session, struct HsMetrics *out);

// # Safety
// `session` must be NULL or a handle from this library not yet freed.
void hs_session_free(struct HsSession *session);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HANDSIGN_H */

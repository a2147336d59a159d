#ifndef WAYFIND_H
#define WAYFIND_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum WayfindStatus {
  WAYFIND_STATUS_OK = 0,
  WAYFIND_STATUS_NULL_ARGUMENT = 1,
  WAYFIND_STATUS_INVALID_UTF8 = 2,
  /**
   * The map document is not well-formed JSON in the expected format.
   */
  WAYFIND_STATUS_MAP_PARSE = 3,
  /**
   * The map parsed but violates a structural rule.
   */
  WAYFIND_STATUS_MAP_INVALID = 4,
  WAYFIND_STATUS_UNKNOWN_NODE = 5,
  WAYFIND_STATUS_BAD_MODE = 6,
  WAYFIND_STATUS_NO_ROUTE = 7,
  /**
   * A payload failed to decode. Session scans still return the
   * `scan_error` event.
   */
  WAYFIND_STATUS_UNDECODABLE = 8,
  /**
   * The payload fields cannot be encoded.
   */
  WAYFIND_STATUS_UNENCODABLE = 9,
  /**
   * The scan decoded but was not applied (foreign map or unknown node).
   * The rejection event is still returned.
   */
  WAYFIND_STATUS_SCAN_REJECTED = 10,
  /**
   * The call is not valid in the session's current state.
   */
  WAYFIND_STATUS_INVALID_STATE = 11,
  WAYFIND_STATUS_NOT_DESTINATION = 12,
  /**
   * A Rust panic was caught at the boundary.
   */
  WAYFIND_STATUS_INTERNAL = 13,
} WayfindStatus;

/**
 * Immutable, validated floor map.
 */
typedef struct WayfindMap WayfindMap;

/**
 * One trip session bound to a map.
 */
typedef struct WayfindSession WayfindSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next call into this library from the same thread.
 */
const char *wayfind_last_error_message(void);

/**
 * Stable lowercase name of a status code. The string is static.
 */
const char *wayfind_status_name(enum WayfindStatus status);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a pointer obtained from this library and not yet freed.
 */
void wayfind_string_free(char *s);

/**
 * Parses and validates a map document.
 *
 * # Safety
 * `json_text` must be a NUL-terminated string; `out_map` must be writable.
 */
enum WayfindStatus wayfind_map_load(const char *json_text, struct WayfindMap **out_map);

/**
 * Releases a map handle. NULL is ignored.
 *
 * # Safety
 * `map` must be NULL or a handle from [`wayfind_map_load`] not yet freed.
 */
void wayfind_map_free(struct WayfindMap *map);

/**
 * Writes the map id as a newly allocated string.
 *
 * # Safety
 * `map` must be a live handle; `out_id` must be writable.
 */
enum WayfindStatus wayfind_map_id(const struct WayfindMap *map, char **out_id);

/**
 * Plans a route and writes it as JSON:
 * `{"nodes": [...], "distance": m, "turns": n, "legs": [...]}`.
 * `mode` is `"shortest"` or `"optimal"`.
 *
 * # Safety
 * `map` must be a live handle, the strings NUL-terminated, `out_json` writable.
 */
enum WayfindStatus wayfind_plan_route(const struct WayfindMap *map,
                                      const char *from,
                                      const char *to,
                                      const char *mode,
                                      char **out_json);

/**
 * Encodes a strip payload.
 *
 * # Safety
 * Strings must be NUL-terminated; `out_payload` must be writable.
 */
enum WayfindStatus wayfind_qr_encode(const char *map_id, const char *node_id, char **out_payload);

/**
 * Decodes a strip payload into its map id and node id.
 *
 * # Safety
 * `payload` must be NUL-terminated; both out-pointers must be writable.
 */
enum WayfindStatus wayfind_qr_decode(const char *payload, char **out_map_id, char **out_node_id);

/**
 * Starts a trip session on `map`. The session holds its own reference to
 * the map.
 *
 * # Safety
 * `map` must be a live handle; `out_session` must be writable.
 */
enum WayfindStatus wayfind_session_new(const struct WayfindMap *map,
                                       struct WayfindSession **out_session);

/**
 * Releases a session handle. NULL is ignored.
 *
 * # Safety
 * `session` must be NULL or a handle from [`wayfind_session_new`] not yet freed.
 */
void wayfind_session_free(struct WayfindSession *session);

/**
 * Feeds one scanned payload to the session and writes the resulting events
 * as a JSON array. On `Undecodable` and `ScanRejected` the array holds the
 * event to announce and the session state is unchanged.
 *
 * # Safety
 * `session` must be a live handle, `payload` NUL-terminated, `out_events`
 * writable.
 */
enum WayfindStatus wayfind_session_scan(struct WayfindSession *session,
                                        const char *payload,
                                        char **out_events);

/**
 * Chooses a destination after a location scan and writes the route
 * announcement events as a JSON array.
 *
 * # Safety
 * `session` must be a live handle, strings NUL-terminated, `out_events`
 * writable.
 */
enum WayfindStatus wayfind_session_select_destination(struct WayfindSession *session,
                                                      const char *destination,
                                                      const char *mode,
                                                      char **out_events);

/**
 * Writes the instruction the walker should currently hear, as a JSON object.
 *
 * # Safety
 * `session` must be a live handle; `out_event` must be writable.
 */
enum WayfindStatus wayfind_session_prompt(const struct WayfindSession *session, char **out_event);

/**
 * Writes a JSON snapshot of the session: state name, current node, next
 * expected node, destination, active route and prompt.
 *
 * # Safety
 * `session` must be a live handle; `out_json` must be writable.
 */
enum WayfindStatus wayfind_session_state(const struct WayfindSession *session, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WAYFIND_H */

#ifndef NETMOD_H
#define NETMOD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NetmodStatus {
  NETMOD_STATUS_OK = 0,
  NETMOD_STATUS_NULL_POINTER = 1,
  NETMOD_STATUS_INVALID_UTF8 = 2,
  NETMOD_STATUS_PARSE_ERROR = 3,
  NETMOD_STATUS_COMPOSE_ERROR = 4,
  NETMOD_STATUS_INVALID_MODULE = 5,
  NETMOD_STATUS_INVALID_ARGUMENT = 6,
  NETMOD_STATUS_PANIC = 7,
} NetmodStatus;

typedef enum NetmodDotStyle {
  NETMOD_DOT_STYLE_SYSTEM = 0,
  NETMOD_DOT_STYLE_RUN = 1,
} NetmodDotStyle;

/**
 * Opaque module handle.
 */
typedef struct NetmodModule NetmodModule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses `.netmod` text. On success `*out` receives a new handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string, `out` a writable pointer.
 */
enum NetmodStatus netmod_module_parse(const char *text, struct NetmodModule **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `m` must come from this library and not be freed twice.
 */
void netmod_module_free(struct NetmodModule *m);

/**
 * `*out = a ∘ b`.
 *
 * # Safety
 * `a` and `b` must be live handles, `out` a writable pointer.
 */
enum NetmodStatus netmod_compose(const struct NetmodModule *a,
                                 const struct NetmodModule *b,
                                 struct NetmodModule **out);

/**
 * `*out` is 1 when the modules are isomorphic, else 0.
 *
 * # Safety
 * `a` and `b` must be live handles, `out` a writable pointer.
 */
enum NetmodStatus netmod_is_isomorphic(const struct NetmodModule *a,
                                       const struct NetmodModule *b,
                                       int32_t *out);

/**
 * Checks the structural rules; failures come back as `InvalidModule`.
 *
 * # Safety
 * `m` must be a live handle.
 */
enum NetmodStatus netmod_module_validate(const struct NetmodModule *m);

/**
 * Element count (places plus transitions).
 *
 * # Safety
 * `m` must be a live handle, `out` a writable pointer.
 */
enum NetmodStatus netmod_module_len(const struct NetmodModule *m, size_t *out);

/**
 * `.netmod` text of the module.
 *
 * # Safety
 * `m` must be a live handle, `out` a writable pointer.
 */
enum NetmodStatus netmod_module_serialize(const struct NetmodModule *m, char **out);

/**
 * Graphviz text of the module.
 *
 * # Safety
 * `m` must be a live handle, `out` a writable pointer.
 */
enum NetmodStatus netmod_module_to_dot(const struct NetmodModule *m,
                                       enum NetmodDotStyle style,
                                       char **out);

/**
 * Canonical form as lowercase hex. Equal strings mean isomorphic modules.
 *
 * # Safety
 * `m` must be a live handle, `out` a writable pointer.
 */
enum NetmodStatus netmod_canonical_form(const struct NetmodModule *m, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void netmod_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into the library on the same thread; do not free.
 */
const char *netmod_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NETMOD_H */

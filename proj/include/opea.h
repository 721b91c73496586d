/* C interface to the OPE-algebra engine. All strings are UTF-8. Strings
 * returned through char** are owned by the caller and released with
 * opea_string_free. */
#ifndef OPEA_H
#define OPEA_H

#if defined(OPEA_BUILDING)
#define OPEA_API __attribute__((visibility("default")))
#else
#define OPEA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct opea_session opea_session;

typedef enum opea_status {
    OPEA_OK = 0,
    OPEA_CHECK_FAILED = 1, /* some verdict does not hold */
    OPEA_SPEC_ERROR = 2,   /* unreadable or invalid spec, unknown names */
    OPEA_NOT_LOCAL = 3,
    OPEA_NOT_SPANNING = 4,
    OPEA_BAD_ARGUMENT = 5,
    OPEA_INTERNAL = 6
} opea_status;

OPEA_API const char* opea_version(void);

/* Message for the last non-OK status on this thread. */
OPEA_API const char* opea_last_error(void);

OPEA_API opea_status opea_session_open(const char* spec_text, opea_session** out);
OPEA_API opea_status opea_session_open_file(const char* path, opea_session** out);
OPEA_API void opea_session_close(opea_session* s);

/* Overrides; rationals as "p/q". */
OPEA_API opea_status opea_set_max_weight(opea_session* s, const char* L);
OPEA_API opea_status opea_set_window(opea_session* s, const char* depth);

/* only: comma-separated check names, or NULL for the spec's selection.
 * format: "text", "json-lines", or NULL for the spec's format.
 * Returns OPEA_OK iff every verdict holds. */
OPEA_API opea_status opea_check(opea_session* s, const char* only, const char* format, int timing, char** report);

OPEA_API opea_status opea_ope(opea_session* s, const char* a, const char* b, char** out);
OPEA_API opea_status opea_product(opea_session* s, const char* a, const char* n, const char* nbar, const char* b, char** out);
OPEA_API opea_status opea_construct(opea_session* s, char** out);
OPEA_API opea_status opea_closure(opea_session* s, char** out);

OPEA_API void opea_string_free(char* p);

#ifdef __cplusplus
}
#endif

#endif

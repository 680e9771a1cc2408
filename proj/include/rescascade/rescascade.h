/*
 * C interface to the rescascade library.
 *
 * Every fallible call takes an rc_context and returns an rc_status; on
 * failure rc_last_error() describes the problem. Strings returned through
 * char** out-parameters are owned by the caller and released with
 * rc_string_free(). Handles are released with their *_destroy function.
 * A context must not be used from two threads at once.
 */
#ifndef RESCASCADE_H
#define RESCASCADE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define RC_API __attribute__((visibility("default")))
#else
#define RC_API
#endif

typedef enum rc_status {
  RC_OK = 0,
  RC_ERR_INVALID_ARGUMENT = 1,
  RC_ERR_VERIFICATION = 2,
  RC_ERR_NOT_FOUND = 3,
  RC_ERR_OVERFLOW = 4,
  RC_ERR_INTERNAL = 5
} rc_status;

/* Pass as a cutoff to select the full (untruncated) cubic interaction. */
#define RC_CUTOFF_UNBOUNDED (-1)

typedef struct rc_context rc_context;
typedef struct rc_genset rc_genset;

RC_API const char* rc_version(void);
RC_API const char* rc_status_name(rc_status status);

RC_API rc_context* rc_context_create(void);
RC_API void rc_context_destroy(rc_context* ctx);
/* Message of the last failed call on ctx; empty after a successful call. */
RC_API const char* rc_last_error(const rc_context* ctx);

/* Frequencies are int64_t[2] = {x, y}. */
RC_API rc_status rc_omega4(rc_context* ctx, const int64_t n1[2], const int64_t n2[2], const int64_t n3[2],
                           const int64_t n4[2], int64_t* out);
RC_API rc_status rc_rectangle_defect(rc_context* ctx, const int64_t n1[2], const int64_t n2[2],
                                     const int64_t n3[2], int64_t* out);

/* Generational sets; JSON form {"generations": [[[x, y], ...], ...]}. */
RC_API rc_status rc_genset_from_json(rc_context* ctx, const char* json, rc_genset** out);
RC_API rc_status rc_genset_seed_p2(rc_context* ctx, rc_genset** out);
/* RC_ERR_NOT_FOUND when the search space (or node budget, 0 = none) is exhausted. */
RC_API rc_status rc_genset_build_lambda0(rc_context* ctx, int P, int box, uint64_t max_nodes, rc_genset** out);
RC_API rc_status rc_genset_to_json(rc_context* ctx, const rc_genset* set, char** out_json);
RC_API size_t rc_genset_generation_count(const rc_genset* set);
RC_API size_t rc_genset_size(const rc_genset* set);
/*
 * Runs the property checks at the given cutoff (>= 0 or RC_CUTOFF_UNBOUNDED).
 * partner_xy holds partner_count (x, y) pairs; pass NULL/0 for no partner.
 * *all_pass receives 1 or 0; *report_json (optional) the full report.
 */
RC_API rc_status rc_genset_verify(rc_context* ctx, const rc_genset* set, int64_t cutoff, const int64_t* partner_xy,
                                  size_t partner_count, int* all_pass, char** report_json);
RC_API void rc_genset_destroy(rc_genset* set);

/*
 * Runs an experiment ("verify-set", "build-lambda", "toy-cascade", "simulate",
 * "norm-growth", "stability-scan") from a JSON config, writing files into
 * out_dir (NULL or "" for none). *report_json receives the report, also on
 * RC_ERR_VERIFICATION where it holds the failing property report.
 * *verdict_pass is 1 when every verdict passed.
 */
RC_API rc_status rc_run_experiment(rc_context* ctx, const char* kind, const char* config_json, const char* out_dir,
                                   char** report_json, int* verdict_pass);

RC_API void rc_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* RESCASCADE_H */

#ifndef APPROXAGG_H
#define APPROXAGG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum AaStatus {
  AA_STATUS_OK = 0,
  AA_STATUS_NULL_POINTER = 1,
  AA_STATUS_INVALID_UTF8 = 2,
  AA_STATUS_PARSE = 3,
  AA_STATUS_INVALID_ARGUMENT = 4,
  AA_STATUS_BUDGET = 5,
  AA_STATUS_UNSUPPORTED = 6,
  AA_STATUS_OVERFLOW = 7,
  AA_STATUS_PANIC = 8,
} AaStatus;

typedef struct AaAgenda AaAgenda;

typedef struct AaBoolFn AaBoolFn;

typedef struct AaMechanism AaMechanism;

// An exact fraction with its floating-point value.
typedef struct AaRatio {
  int64_t numerator;
  uint64_t denominator;
  double value;
} AaRatio;

// A Monte-Carlo estimate with its 99% confidence interval.
typedef struct AaEstimate {
  double mean;
  double ci_low;
  double ci_high;
  uint64_t samples;
  uint64_t seed;
} AaEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call on the same thread.
const char *aa_last_error(void);

// Library version as a static NUL-terminated string.
const char *aa_version(void);

// # Safety
// `s` must be null or a string returned by this library.
void aa_string_free(char *s);

// Parses a function spec (`maj`, `dict1`, `olig3`, `lin5`, `n=3:e8`, ...).
//
// # Safety
// `spec` must be a NUL-terminated string and `out` writable.
enum AaStatus aa_boolfn_parse(const char *spec, uint32_t voters, struct AaBoolFn **out);

// # Safety
// `f` must be null or a handle from [`aa_boolfn_parse`].
void aa_boolfn_free(struct AaBoolFn *f);

// # Safety
// `f` must be a live handle.
uint32_t aa_boolfn_arity(const struct AaBoolFn *f);

// Influence of 1-based `voter`.
//
// # Safety
// `f` must be a live handle and `out` writable.
enum AaStatus aa_boolfn_influence(const struct AaBoolFn *f, uint32_t voter, struct AaRatio *out);

// Ignorability of 1-based `voter`.
//
// # Safety
// `f` must be a live handle and `out` writable.
enum AaStatus aa_boolfn_ignorability(const struct AaBoolFn *f, uint32_t voter, struct AaRatio *out);

// Fraction of inputs on which `f` outputs 1.
//
// # Safety
// `f` must be a live handle and `out` writable.
enum AaStatus aa_boolfn_expectation(const struct AaBoolFn *f, struct AaRatio *out);

// Fraction of inputs on which `f` and `g` differ.
//
// # Safety
// `f` and `g` must be live handles and `out` writable.
enum AaStatus aa_boolfn_distance(const struct AaBoolFn *f,
                                 const struct AaBoolFn *g,
                                 struct AaRatio *out);

// Parses an agenda spec (`conjunction:2`, `xor:2`, `pref:3`, `id`, ...).
//
// # Safety
// `spec` must be a NUL-terminated string and `out` writable.
enum AaStatus aa_agenda_parse(const char *spec, struct AaAgenda **out);

// # Safety
// `a` must be null or a handle from [`aa_agenda_parse`].
void aa_agenda_free(struct AaAgenda *a);

// Issue count, or 0 for a null handle.
//
// # Safety
// `a` must be null or a live handle.
uint32_t aa_agenda_issues(const struct AaAgenda *a);

// Number of consistent opinions, or 0 for a null handle.
//
// # Safety
// `a` must be null or a live handle.
size_t aa_agenda_size(const struct AaAgenda *a);

// Whether the opinion mask (bit `j-1` for issue `j`) is consistent.
//
// # Safety
// `a` must be null or a live handle.
bool aa_agenda_is_consistent(const struct AaAgenda *a, uint32_t opinion);

// Parses a mechanism spec (`systematic:maj`, `olig:3`, `linear:3:+-+`, ...).
//
// # Safety
// `spec` must be a NUL-terminated string, `agenda` live and `out` writable.
enum AaStatus aa_mechanism_parse(const char *spec,
                                 const struct AaAgenda *agenda,
                                 uint32_t voters,
                                 struct AaMechanism **out);

// # Safety
// `m` must be null or a handle from [`aa_mechanism_parse`].
void aa_mechanism_free(struct AaMechanism *m);

// Exact inconsistency index by enumeration.
//
// # Safety
// Handles must be live and `out` writable.
enum AaStatus aa_ic_exact(const struct AaMechanism *m,
                          const struct AaAgenda *agenda,
                          struct AaRatio *out);

// Seeded Monte-Carlo inconsistency index.
//
// # Safety
// Handles must be live and `out` writable.
enum AaStatus aa_ic_mc(const struct AaMechanism *m,
                       const struct AaAgenda *agenda,
                       uint64_t samples,
                       uint64_t seed,
                       struct AaEstimate *out);

// Exact dependency index of 1-based `issue`.
//
// # Safety
// Handles must be live and `out` writable.
enum AaStatus aa_di_exact(const struct AaMechanism *m,
                          const struct AaAgenda *agenda,
                          uint32_t issue,
                          struct AaRatio *out);

// Exact maximum dependency index over issues.
//
// # Safety
// Handles must be live and `out` writable.
enum AaStatus aa_di_max_exact(const struct AaMechanism *m,
                              const struct AaAgenda *agenda,
                              struct AaRatio *out);

// Distance to the nearest consistent independent mechanism, whose id is
// written to `nearest_id` when that pointer is non-null.
//
// # Safety
// Handles must be live, `out` writable and `nearest_id` null or writable.
enum AaStatus aa_nearest_ci(const struct AaMechanism *m,
                            const struct AaAgenda *agenda,
                            struct AaRatio *out,
                            char **nearest_id);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* APPROXAGG_H */

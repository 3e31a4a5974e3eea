#ifndef NWINT_NWINT_H
#define NWINT_NWINT_H

/* C interface: parse a function spec, run a command, receive a JSON document.
   Every call returns a status; JSON results are allocated by the library and
   released with nwint_string_free. */

#include <stddef.h>

#if defined(_WIN32)
#define NWINT_API __declspec(dllexport)
#else
#define NWINT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  NWINT_OK = 0,
  NWINT_INVALID_ARGUMENT = 1,
  NWINT_INVALID_SPEC,
  NWINT_DIVISOR_CONTAINS_ZERO,
  NWINT_NEGATIVE_SQRT_DOMAIN,
  NWINT_DEGENERATE_TARGET,
  NWINT_INFEASIBLE_MASS,
  NWINT_DEPTH_TOO_SMALL,
  NWINT_DIVERGENT_TAIL,
  NWINT_NOT_DOMINANT,
  NWINT_NON_PRIME_THETA,
  NWINT_NOT_DISJOINT,
  NWINT_INTERVAL_TOO_SHORT,
  NWINT_OUT_OF_RANGE,
  NWINT_CONSTANT_TERM_PRESENT,
  NWINT_ZERO_POLYNOMIAL,
  NWINT_ZERO_INPUT,
  NWINT_ZERO_COMBINATION,
  NWINT_NONTERMINATION_BUDGET,
  NWINT_UNSUPPORTED,
  /* The document was produced but some claim stayed open at the budget. */
  NWINT_INCONCLUSIVE = 100,
  /* A report was produced but some of its entries failed. */
  NWINT_REPORT_HAS_ERRORS = 101,
  NWINT_INTERNAL = 102
} nwint_status;

typedef struct nwint_spec nwint_spec;

/* Parses a spec document; on failure *out is NULL and nwint_last_error()
   describes the problem. */
NWINT_API nwint_status nwint_spec_from_json(const char* json, nwint_spec** out);
NWINT_API void nwint_spec_free(nwint_spec* spec);
/* "key=value,..." over maxgen, depth, terms, precision, tolerance,
   max_index, max_boxes. */
NWINT_API nwint_status nwint_spec_set_budget(nwint_spec* spec, const char* assignments);

/* Options are a JSON object (may be NULL); see the README for the keys
   each command reads. On NWINT_OK and NWINT_INCONCLUSIVE *out holds the
   result document. */
NWINT_API nwint_status nwint_tower_build(const nwint_spec* spec, const char* options, char** out);
NWINT_API nwint_status nwint_tower_show(const nwint_spec* spec, const char* options, char** out);
NWINT_API nwint_status nwint_fn_eval(const nwint_spec* spec, const char* options, char** out);
NWINT_API nwint_status nwint_fn_integrate(const nwint_spec* spec, const char* options, char** out);
/* which: "l1", "bv" or "alexiewicz". */
NWINT_API nwint_status nwint_norm(const nwint_spec* spec, const char* which, const char* options, char** out);
/* claim: unbounded, jump-nonzero, jump-dense, non-lebesgue, basis,
   perturbation, measure-enclosure or norm-enclosure. */
NWINT_API nwint_status nwint_certify(const nwint_spec* spec, const char* claim, const char* options, char** out);
/* Aggregates the claims of `count` specs (specs may be NULL when count is
   0); options {"bundled": true, "full": false} add the built-in checklist. */
NWINT_API nwint_status nwint_report(const nwint_spec* const* specs, size_t count, const char* options, char** out);

NWINT_API void nwint_string_free(char* s);
/* Message of the last failure on this thread, "" if none. */
NWINT_API const char* nwint_last_error(void);
NWINT_API const char* nwint_status_name(nwint_status status);
NWINT_API const char* nwint_version(void);

#ifdef __cplusplus
}
#endif

#endif

/*
 * C interface to the cmt library: exact measures, monotone machines,
 * martingales, mass-transport plans and extractors on Cantor space.
 *
 * Conventions:
 *   - every function returns a cmt_status; CMT_OK means the call itself
 *     succeeded (a verification that ran and failed still returns CMT_OK
 *     and reports through its *pass output);
 *   - on any non-OK status, cmt_last_error() describes the problem;
 *   - all char** outputs are heap strings owned by the caller, released
 *     with cmt_string_free(); rationals travel as canonical "p/q" text;
 *   - binary words are '0'/'1' strings, "e" for the empty word;
 *   - handles are opaque and freed with their matching *_free function.
 */
#ifndef CMT_H
#define CMT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cmt_status {
  CMT_OK = 0,
  CMT_BAD_INPUT = 1,
  CMT_ERROR = 2
} cmt_status;

typedef struct cmt_measure cmt_measure;
typedef struct cmt_product cmt_product;
typedef struct cmt_machine cmt_machine;
typedef struct cmt_oracle cmt_oracle;
typedef struct cmt_plan cmt_plan;
typedef struct cmt_family cmt_family;

const char* cmt_last_error(void);
void cmt_string_free(char* s);

/* ---- measures ---- */

cmt_status cmt_measure_parse(const char* ref, cmt_measure** out);
void cmt_measure_free(cmt_measure* m);
cmt_status cmt_measure_label(const cmt_measure* m, char** label);
cmt_status cmt_measure_eval(const cmt_measure* m, const char* word,
                            char** value);
/* report holds one "VIOLATION node=<w> ..." line per failing node */
cmt_status cmt_check_additivity(const cmt_measure* m, uint32_t depth,
                                int* pass, char** report);
cmt_status cmt_dominates(const cmt_measure* mu, const cmt_measure* nu,
                         uint32_t depth, int* pass, char** failed_at);

/* ---- points ---- */

/* pattern repeated forever */
cmt_status cmt_oracle_pattern(const char* pattern, cmt_oracle** out);
/* seeded dyadic point: precision pseudo-random bits, then zeros */
cmt_status cmt_oracle_seeded(uint64_t seed, uint32_t precision,
                             cmt_oracle** out);
void cmt_oracle_free(cmt_oracle* o);

/* ---- machines ---- */

cmt_status cmt_machine_parse(const char* ref, cmt_machine** out);
void cmt_machine_free(cmt_machine* m);
cmt_status cmt_machine_step(const cmt_machine* m, const char* input,
                            char** output);
cmt_status cmt_machine_check_monotone(const cmt_machine* m, uint32_t depth,
                                      int* pass, char** counterexample);
cmt_status cmt_pushforward_bounds(const cmt_machine* m, const cmt_measure* mu,
                                  const char* tau, uint32_t depth, char** lo,
                                  char** hi);
cmt_status cmt_preimage_search(const cmt_machine* m, const cmt_measure* mu,
                               const char* tau, uint32_t depth, char** report);

/* ---- martingales ---- */

/* lines "<n> <p/q>", one per depth; a trailing "ZERODENOM depth=<n>" line
 * reports a truncated trace and sets *truncated */
cmt_status cmt_martingale_trace(const cmt_measure* nu, const cmt_measure* mu,
                                const cmt_oracle* x, uint32_t n,
                                int* truncated, char** lines);
cmt_status cmt_divergence_witness(const cmt_measure* nu, const cmt_measure* mu,
                                  const cmt_oracle* x, const char* threshold,
                                  uint32_t max_depth, int* found,
                                  uint32_t* depth);

/* ---- conditional measures ---- */

cmt_status cmt_product_parse(const char* ref, cmt_product** out);
void cmt_product_free(cmt_product* p);
cmt_status cmt_conditional_value(const cmt_product* p, const char* cond_prefix,
                                 const char* sigma, char** value);

/* ---- density experiment ---- */

/* lines "<k> lo=<p/q> hi=<p/q> exact=<0|1>" */
cmt_status cmt_density_trace(const cmt_measure* m, const char* clopen_ref,
                             const cmt_oracle* x, uint32_t n,
                             uint32_t working_depth, char** lines);

/* ---- transport plans ---- */

cmt_status cmt_plan_build(const char* mu_ref, const char* nuprime_ref,
                          const char* x0_pattern, uint32_t depth,
                          cmt_plan** out);
cmt_status cmt_plan_load(const char* text, cmt_plan** out);
void cmt_plan_free(cmt_plan* p);
cmt_status cmt_plan_text(const cmt_plan* p, char** text);
/* ledger lines "PUSHFORWARD sigma=<w> ledger=<p/q> mu=<p/q> ok=<0|1>" */
cmt_status cmt_plan_verify(const cmt_plan* p, uint32_t depth, int* pass,
                           char** ledger);
cmt_status cmt_plan_certificate(const cmt_plan* p, const char* y0,
                                uint32_t max_depth, int* found,
                                uint32_t* depth, char** bound);
/* trace lines "STAGE <k> col=<w> y=[p/q,p/q]"; stalls add "STALLED stage=<k>" */
cmt_status cmt_plan_trace(const cmt_plan* p, const cmt_oracle* omega,
                          uint32_t stages, uint32_t fuel, char** lines);
/* seeded product-space samples with y0 in [y0_min, 1); checks that every
 * non-stalled sample leaves the witness column by stage cert_depth */
cmt_status cmt_plan_trace_samples(cmt_plan* p, uint64_t seed, uint32_t count,
                                  const char* y0_min, uint32_t cert_depth,
                                  uint32_t fuel, int* pass, char** report);

/* ---- extractors ---- */

cmt_status cmt_family_parse(const char* ref, cmt_family** out);
void cmt_family_free(cmt_family* f);
cmt_status cmt_check_independence(const cmt_family* f, uint32_t k, int* pass,
                                  char** witness);
/* running means, lines "<k> <p/q>"; sets *stalled when output ran short */
cmt_status cmt_slln_trace(const cmt_machine* m, const cmt_oracle* x,
                          uint32_t n, uint32_t fuel, int* stalled,
                          char** lines);

#ifdef __cplusplus
}
#endif

#endif /* CMT_H */

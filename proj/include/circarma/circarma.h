#ifndef CIRCARMA_H
#define CIRCARMA_H

/* C interface of the circarma shared library.
 *
 * Every entry point takes a JSON request document and produces an opaque
 * result handle carrying a JSON body and, for tabular outputs, a CSV
 * payload. Request and response schemas are documented in FORMATS.md.
 *
 * Return codes:
 *   0  success
 *   1  domain failure (infeasible data, boundary termination, failed
 *      factorization); the result handle still carries a diagnostic body
 *   2  malformed request or contract violation; *out is left NULL
 *   3  internal error; *out is left NULL
 *
 * On nonzero returns circarma_last_error() describes the failure for the
 * calling thread.
 */

#ifdef __cplusplus
extern "C" {
#endif

#define CIRCARMA_OK 0
#define CIRCARMA_ERR_DOMAIN 1
#define CIRCARMA_ERR_INPUT 2
#define CIRCARMA_ERR_INTERNAL 3

typedef struct circarma_result circarma_result;

const char* circarma_version(void);

/* command is one of: check, solve, cepstral-solve, block-solve, extend,
 * factor, simulate, sweep */
int circarma_run(const char* command, const char* request_json, circarma_result** out);

int circarma_check(const char* request_json, circarma_result** out);
int circarma_solve(const char* request_json, circarma_result** out);
int circarma_cepstral_solve(const char* request_json, circarma_result** out);
int circarma_block_solve(const char* request_json, circarma_result** out);
int circarma_extend(const char* request_json, circarma_result** out);
int circarma_factor(const char* request_json, circarma_result** out);
int circarma_simulate(const char* request_json, circarma_result** out);
int circarma_sweep(const char* request_json, circarma_result** out);

/* Owned by the result handle; valid until circarma_result_free. */
const char* circarma_result_json(const circarma_result* result);
/* NULL when the command produced no CSV payload. */
const char* circarma_result_csv(const circarma_result* result);
void circarma_result_free(circarma_result* result);

/* Thread-local message for the last failing call. */
const char* circarma_last_error(void);

/* Cap on the side length 2mN of dense materializations. cap <= 0 restores
 * the CIRCARMA_DENSE_CAP environment override or the built-in 4096. */
void circarma_set_dense_cap(long cap);

#ifdef __cplusplus
}
#endif

#endif

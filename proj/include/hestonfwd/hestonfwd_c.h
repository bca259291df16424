#ifndef HESTONFWD_C_H
#define HESTONFWD_C_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Stable C interface to the forward-curve engine. All functions return a
 * status code; results are read back through accessor calls on the opaque
 * handle. Strings returned by accessors are owned by the engine and stay
 * valid until the next hf_run / hf_engine_destroy on that handle. */

typedef struct hf_engine hf_engine;

enum {
  HF_OK = 0,
  HF_ERR_RUNTIME = 1, /* numerical or verification failure */
  HF_ERR_CONFIG = 2   /* bad configuration, arguments, or command */
};

/* Create an engine from configuration text (empty string = defaults), or
 * from a configuration file. On failure returns NULL; call
 * hf_last_error(NULL) for the message. */
hf_engine* hf_engine_create(const char* config_text);
hf_engine* hf_engine_create_from_file(const char* path);
void hf_engine_destroy(hf_engine* e);

int hf_engine_set_seed(hf_engine* e, uint64_t seed);
int hf_engine_set_threads(hf_engine* e, int threads);
int hf_engine_set_json(hf_engine* e, int enable);

/* Run a command: "simulate" | "price" | "greeks" | "verify".
 * HF_OK on success, HF_ERR_RUNTIME if a verification check failed or a
 * numerical guard tripped, HF_ERR_CONFIG for unknown commands or invalid
 * configuration. Artifacts are available on HF_OK, and also after a failed
 * "verify" run. */
int hf_run(hf_engine* e, const char* command);

/* Artifacts produced by the last run. */
size_t hf_artifact_count(const hf_engine* e);
const char* hf_artifact_name(const hf_engine* e, size_t index);
const char* hf_artifact_content(const hf_engine* e, size_t index);

/* Canonical round-trip serialization of the engine's configuration. */
const char* hf_config_canonical(hf_engine* e);

/* Message for the most recent failure on this handle; with a NULL handle,
 * the most recent creation failure on this thread. */
const char* hf_last_error(const hf_engine* e);

#ifdef __cplusplus
}
#endif

#endif /* HESTONFWD_C_H */

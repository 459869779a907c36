#ifndef ONENET_H
#define ONENET_H

/* C interface to the joint spoken-language-understanding toolkit.
 *
 * All functions return onenet_status; on any non-zero status a description
 * is available from onenet_last_error() (thread-local, valid until the next
 * call on the same thread). Strings returned through out parameters are
 * heap-allocated and must be released with onenet_free_string().
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define ONENET_API __declspec(dllexport)
#elif defined(__GNUC__)
#define ONENET_API __attribute__((visibility("default")))
#else
#define ONENET_API
#endif

typedef enum onenet_status {
    ONENET_OK = 0,
    ONENET_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad key, bad variant */
    ONENET_ERR_IO = 2,               /* unreadable/unwritable file, bad format */
    ONENET_ERR_RUNTIME = 3           /* training/inference failure */
} onenet_status;

ONENET_API const char* onenet_last_error(void);
ONENET_API void onenet_free_string(char* s);

/* Builds a seeded synthetic benchmark corpus (train/tune/test JSONL plus
 * schema sidecars) in out_dir. spec_path NULL or empty selects the built-in
 * five-domain benchmark; seed < 0 keeps the spec's own seed. *out_summary
 * (optional, may be NULL) receives a one-line summary. */
ONENET_API onenet_status onenet_generate(const char* out_dir, const char* spec_path, long long seed,
                              char** out_summary);

/* The remaining operations are driven by a flat key=value configuration:
 * an optional config file plus an array of "key=value" override strings
 * applied on top (unknown keys are rejected). Recognized keys include
 * train, tune, test, schema, embeddings, out_dir, variant, seed,
 * learning_rate, stage_epochs, patience, dropout_keep, crf_score, use_char
 * and the model dimension keys. */

/* Trains the configured variant and writes checkpoints, a run manifest and
 * the per-epoch log under out_dir. */
ONENET_API onenet_status onenet_train(const char* config_path, const char* const* overrides,
                           size_t n_overrides, char** out_summary);

/* Evaluates the checkpoints in out_dir on the configured test split and
 * writes report.json; *out_table receives the per-domain table. */
ONENET_API onenet_status onenet_eval(const char* config_path, const char* const* overrides,
                          size_t n_overrides, char** out_table);

/* Labels utterances read from input_path ("-" = stdin), one JSON object
 * per line with a "tokens" array; *out_jsonl receives one prediction per
 * line. */
ONENET_API onenet_status onenet_predict(const char* config_path, const char* const* overrides,
                             size_t n_overrides, const char* input_path, char** out_jsonl);

/* Trains and evaluates each comma-separated variant (e.g.
 * "joint,independent,pipeline,oracle") with identical data and
 * hyperparameters; *out_table receives the comparison table. */
ONENET_API onenet_status onenet_compare(const char* config_path, const char* const* overrides,
                             size_t n_overrides, const char* variants, char** out_table);

/* Checks analytic gradients against central differences on a miniature
 * model; fails with ONENET_ERR_RUNTIME when they disagree. */
ONENET_API onenet_status onenet_gradcheck(long long seed, char** out_report);

/* Streaming inference over an already-trained run directory. */
typedef struct onenet_model onenet_model;

ONENET_API onenet_status onenet_model_open(const char* variant, const char* run_dir,
                                const char* schema_path, onenet_model** out_model);

/* request_json: {"tokens": ["..."], "domain": "..."} ("domain" optional,
 * consulted only by the oracle variant). *out_json receives the prediction
 * as {"tokens": ..., "domain": ..., "intent": ..., "slots": [...]}. */
ONENET_API onenet_status onenet_model_predict(onenet_model* model, const char* request_json,
                                   char** out_json);

ONENET_API void onenet_model_close(onenet_model* model);

#ifdef __cplusplus
}
#endif

#endif /* ONENET_H */

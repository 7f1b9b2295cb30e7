/*
 * gradphon: continuous underlying forms for morphemes, learned end to end
 * with a character-level recurrent decoder.
 *
 * C interface to the shared library. All functions are safe to call from
 * several threads as long as each handle is used by one thread at a time;
 * gp_model handles are read-only after loading and may be shared freely.
 *
 * Every function returning gp_status reports failures through its return
 * value; gp_last_error() then holds a message for the calling thread.
 *
 * String outputs use a caller-owned buffer: *len receives the length of the
 * full result (without the terminating NUL). If buf is NULL or cap <= *len
 * the function returns GP_ERR_BUFFER_TOO_SMALL and writes nothing.
 */
#ifndef GRADPHON_GRADPHON_H
#define GRADPHON_GRADPHON_H

#include <stddef.h>

#if defined(_WIN32)
#define GP_API __declspec(dllexport)
#else
#define GP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gp_status {
  GP_OK = 0,
  GP_ERR_USAGE = 1,
  GP_ERR_CONFIG = 2,
  GP_ERR_DATA = 3,
  GP_ERR_PARSE = 4,
  GP_ERR_FORMAT = 5,
  GP_ERR_NUMERIC = 6,
  GP_ERR_DIMENSION = 7,
  GP_ERR_INDEX = 8,
  GP_ERR_VOCABULARY = 9,
  GP_ERR_UNKNOWN_MORPHEME = 10,
  GP_ERR_TRAINING = 11,
  GP_ERR_SPLIT = 12,
  GP_ERR_COMPATIBILITY = 13,
  GP_ERR_IO = 14,
  GP_ERR_BUFFER_TOO_SMALL = 15,
  GP_ERR_INTERNAL = 99
} gp_status;

GP_API const char* gp_version(void);
GP_API const char* gp_status_name(gp_status status);
/* Message of the last failed call on this thread; "" if none. */
GP_API const char* gp_last_error(void);

/* ---- Run configuration ------------------------------------------------ */

typedef struct gp_config gp_config;

/* Receives one progress line (no trailing newline). */
typedef void (*gp_log_fn)(const char* line, void* user);

GP_API gp_status gp_config_create(gp_config** out);
GP_API void gp_config_destroy(gp_config* config);
/* Unknown keys are GP_ERR_USAGE. */
GP_API gp_status gp_config_set(gp_config* config, const char* key, const char* value);
/* Flat key=value text file; '#' starts a comment line. */
GP_API gp_status gp_config_load_file(gp_config* config, const char* path);
GP_API gp_status gp_config_get(const gp_config* config, const char* key, char* buf, size_t cap, size_t* len);
/* Effective configuration as sorted key=value lines. */
GP_API gp_status gp_config_dump(const gp_config* config, char* buf, size_t cap, size_t* len);
GP_API void gp_config_set_logger(gp_config* config, gp_log_fn fn, void* user);

/* ---- Commands --------------------------------------------------------- */

typedef struct gp_train_summary {
  size_t epochs;
  size_t best_epoch;
  double best_dev_loss;
  size_t train_size;
  size_t dev_size;
  size_t test_size;
} gp_train_summary;

typedef struct gp_eval_summary {
  double accuracy;           /* percent exact match */
  double mean_edit_distance; /* per item */
  double mean_surprisal;     /* nats per symbol */
  size_t items;
  size_t unknown_morpheme_items;
} gp_eval_summary;

/* Writes model.ckpt, train_log.tsv, split_{train,dev,test}.txt, config.txt. */
GP_API gp_status gp_train(const gp_config* config, gp_train_summary* summary);
/* Writes report.tsv and report.json. */
GP_API gp_status gp_evaluate(const gp_config* config, gp_eval_summary* summary);
/* Writes the embedding table; the output path is returned through buf. */
GP_API gp_status gp_export_embeddings(const gp_config* config, char* buf, size_t cap, size_t* len);
/* Writes resample.tsv; its contents are returned through buf. */
GP_API gp_status gp_resample(const gp_config* config, char* buf, size_t cap, size_t* len);

/* ---- Loaded models ---------------------------------------------------- */

typedef struct gp_model gp_model;

typedef struct gp_model_info {
  const char* variant; /* "pos-indep", "pos-dep" or "joint"; owned by the model */
  size_t dim;
  size_t symbols;
  size_t morphemes;
  size_t max_decode_len;
} gp_model_info;

GP_API gp_status gp_model_load(const char* path, gp_model** out);
GP_API void gp_model_destroy(gp_model* model);
GP_API gp_status gp_model_info_get(const gp_model* model, gp_model_info* info);
/* spec: morpheme identifiers joined by '+', e.g. "run + V;PST". */
GP_API gp_status gp_model_predict(const gp_model* model, const char* spec, size_t beam, char* buf, size_t cap,
                                  size_t* len);
GP_API gp_status gp_model_surprisal(const gp_model* model, const char* spec, const char* gold, double* out);
GP_API gp_status gp_model_similarity(const gp_model* model, const char* a, const char* b, double* out);

#ifdef __cplusplus
}
#endif

#endif /* GRADPHON_GRADPHON_H */

/* faithbench C API
 *
 * A benchmark engine for local feature-attribution faithfulness metrics on
 * tabular binary classifiers. The core is C++; this header is the stable
 * shared-library surface: opaque handles, integer status codes, UTF-8 JSON
 * strings for structured parameters.
 *
 * Conventions:
 *   - Every function returns fb_status; FB_OK is 0.
 *   - On failure, fb_last_error() returns a thread-local message describing
 *     the most recent error on the calling thread.
 *   - Handles created by fb_*_create/load/... must be released with the
 *     matching fb_*_free. Freeing NULL is a no-op.
 *   - Objects behind handles are immutable; operations that transform them
 *     return new handles.
 */

#ifndef FAITHBENCH_H
#define FAITHBENCH_H

#include <stddef.h>

#if defined _WIN32
#define FB_API __declspec(dllexport)
#else
#define FB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fb_status {
    FB_OK = 0,
    FB_E_INVALID_ARGUMENT = 1, /* bad parameters or config values */
    FB_E_IO = 2,               /* missing/unreadable/unwritable files */
    FB_E_PARSE = 3,            /* malformed CSV or JSON */
    FB_E_SCHEMA = 4,           /* schema, label or dimension violations */
    FB_E_NUMERIC = 5,          /* training divergence, singular systems */
    FB_E_UNAVAILABLE = 6,      /* requested artifact cannot be constructed */
    FB_E_PARTIAL = 7,          /* grid run finished with failed cells */
    FB_E_INTERNAL = 8
} fb_status;

typedef struct fb_dataset fb_dataset;
typedef struct fb_model fb_model;
typedef struct fb_table fb_table;

FB_API const char* fb_version(void);

/* Thread-local message for the last failing call on this thread. Never NULL;
 * empty string when no error has occurred. */
FB_API const char* fb_last_error(void);

/* ---- datasets ---------------------------------------------------------- */

/* spec_json: {"n_samples":1000,"n_features":24,"coefficients":[...],
 *             "noise_std":0.5,"seed":7}; all fields optional. */
FB_API fb_status fb_dataset_synth(const char* spec_json, fb_dataset** out);

FB_API fb_status fb_dataset_load(const char* csv_path, const char* schema_path,
                                 fb_dataset** out);
FB_API fb_status fb_dataset_save(const fb_dataset* ds, const char* csv_path,
                                 const char* schema_path);
FB_API fb_status fb_dataset_standardize(const fb_dataset* ds, fb_dataset** out);
FB_API fb_status fb_dataset_inject_random(const fb_dataset* ds, int count,
                                          long long seed, fb_dataset** out);
FB_API size_t fb_dataset_rows(const fb_dataset* ds);
FB_API size_t fb_dataset_cols(const fb_dataset* ds);
/* Hex content hash; buf receives a NUL-terminated string. */
FB_API fb_status fb_dataset_hash(const fb_dataset* ds, char* buf, size_t buflen);
FB_API void fb_dataset_free(fb_dataset* ds);

/* ---- models ------------------------------------------------------------ */

/* train_json: {"architecture":"linear"|"dense3","epochs":150,"batch_size":32,
 *              "learning_rate":0.05,"hidden_widths":[64,32],"seed":7} */
FB_API fb_status fb_model_train(const fb_dataset* ds, const char* train_json,
                                fb_model** out);
FB_API fb_status fb_model_load(const char* path, fb_model** out);
FB_API fb_status fb_model_save(const fb_model* model, const char* path);
FB_API fb_status fb_model_predict(const fb_model* model, const double* x, size_t d,
                                  double* out);
FB_API fb_status fb_model_logit(const fb_model* model, const double* x, size_t d,
                                double* out);
/* target: 0 = probability, 1 = logit. grad_out must hold d doubles. */
FB_API fb_status fb_model_input_gradient(const fb_model* model, const double* x,
                                         size_t d, int target, double* grad_out);
FB_API void fb_model_free(fb_model* model);

/* ---- attribution tables ------------------------------------------------ */

/* request_json: {"method":"integrated-gradients"|"kernel-shap"|"random"|
 *                "ground-truth","baseline":"constant-median"|"training"|
 *                "opposite-class"|"nearest-neighbors","k":5,"repeat":0,
 *                "seed":7,"ig_steps":50,"n_coalitions":2048} */
FB_API fb_status fb_table_generate(const fb_dataset* ds, const fb_model* model,
                                   const char* request_json, fb_table** out);
FB_API fb_status fb_table_import(const fb_dataset* ds, const char* csv_path,
                                 const char* sidecar_path, fb_table** out);
FB_API fb_status fb_table_save(const fb_table* table, const fb_dataset* ds,
                               const char* csv_path, const char* sidecar_path);
FB_API size_t fb_table_rows(const fb_table* table);
FB_API size_t fb_table_cols(const fb_table* table);
FB_API fb_status fb_table_value(const fb_table* table, size_t row, size_t col,
                                double* out);
FB_API void fb_table_free(fb_table* table);

/* ---- metrics ----------------------------------------------------------- */

/* cfg_json (both metrics): {"k":6,"m":10,"sigma":0.1,"flip_prob":0.3,
 *  "numeric_mode":"gaussian"|"marginal","aggregate_categorical":true,
 *  "per_row":false,"seed":7}; all fields optional. */
FB_API fb_status fb_metric_pgi(const fb_model* model, const fb_dataset* ds,
                               const fb_table* table, const char* cfg_json,
                               double* out);
FB_API fb_status fb_metric_abc(const fb_model* model, const fb_dataset* ds,
                               const fb_table* table, const char* cfg_json,
                               double* out);

/* ---- pipeline commands -------------------------------------------------- */

/* Each command takes the full experiment config as a JSON document (see
 * README for the schema) and writes its outputs under the config's out_dir.
 * fb_cmd_grid returns FB_E_PARTIAL when some cells failed but others
 * completed. */
FB_API fb_status fb_cmd_synth(const char* config_json);
FB_API fb_status fb_cmd_train(const char* config_json);
FB_API fb_status fb_cmd_explain(const char* config_json);
FB_API fb_status fb_cmd_score(const char* config_json);
FB_API fb_status fb_cmd_tda(const char* config_json);
FB_API fb_status fb_cmd_rank(const char* config_json);
FB_API fb_status fb_cmd_permute_exp(const char* config_json);
FB_API fb_status fb_cmd_grid(const char* config_json);
FB_API fb_status fb_cmd_report(const char* config_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FAITHBENCH_H */

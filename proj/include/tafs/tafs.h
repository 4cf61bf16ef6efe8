/* C interface to the tafs library.
 *
 * Every fallible call returns a tafs_status; on failure the message is
 * available from tafs_last_error() on the same thread until the next call.
 * Handles are opaque and owned by the caller: free each with its _free
 * function (passing NULL is allowed). Strings returned as `const char*` stay
 * valid until the owning handle is freed or modified.
 */
#ifndef TAFS_H
#define TAFS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TAFS_BUILDING)
#    define TAFS_API __declspec(dllexport)
#  else
#    define TAFS_API __declspec(dllimport)
#  endif
#else
#  define TAFS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tafs_status {
    TAFS_OK = 0,
    TAFS_ERR_CONFIG = 1,   /* bad configuration, unknown names */
    TAFS_ERR_DATA = 2,     /* schema, ordering, shape, too few samples */
    TAFS_ERR_NUMERIC = 3,  /* non-finite numeric input */
    TAFS_ERR_IO = 4,
    TAFS_ERR_INTERNAL = 5,
    TAFS_ERR_ARGUMENT = 6  /* NULL handle or out-of-range index */
} tafs_status;

TAFS_API const char* tafs_version(void);
TAFS_API const char* tafs_last_error(void);

/* ---- price series ---------------------------------------------------- */

typedef struct tafs_series tafs_series;

/* CSV with header Date,Open,High,Low,Close,Adj Close,Volume. */
TAFS_API tafs_status tafs_series_load(const char* path, tafs_series** out);
TAFS_API tafs_status tafs_series_synthetic(size_t days, uint64_t seed, tafs_series** out);
/* Fills missing cells with the column mean. */
TAFS_API tafs_status tafs_series_impute(tafs_series* series);
TAFS_API size_t tafs_series_length(const tafs_series* series);
TAFS_API size_t tafs_series_missing(const tafs_series* series);
TAFS_API tafs_status tafs_series_write(const tafs_series* series, const char* path);
TAFS_API void tafs_series_free(tafs_series* series);

/* ---- indicators ------------------------------------------------------ */

typedef struct tafs_frame tafs_frame;

TAFS_API size_t tafs_indicator_count(void);
/* Registry key of native indicator i (sorted), or NULL. */
TAFS_API const char* tafs_indicator_name(size_t i);

/* `roster` holds one spec per line or ';'-separated, e.g. "sma(length=10); rsi".
 * NULL uses every native indicator at its defaults. With drop_warmup set,
 * leading rows with any missing value are removed and their number is
 * stored in *dropped (which may be NULL). */
TAFS_API tafs_status tafs_indicators_compute(const tafs_series* series, const char* roster, int drop_warmup,
                                             tafs_frame** out, size_t* dropped);
TAFS_API tafs_status tafs_frame_read(const char* path, tafs_frame** out);
TAFS_API tafs_status tafs_frame_write(const tafs_frame* frame, const char* path);
TAFS_API size_t tafs_frame_rows(const tafs_frame* frame);
TAFS_API size_t tafs_frame_cols(const tafs_frame* frame);
TAFS_API const char* tafs_frame_column_name(const tafs_frame* frame, size_t col);
/* NaN for missing entries or out-of-range indices. */
TAFS_API double tafs_frame_value(const tafs_frame* frame, size_t row, size_t col);
TAFS_API void tafs_frame_free(tafs_frame* frame);

/* ---- windowed datasets ----------------------------------------------- */

typedef struct tafs_dataset tafs_dataset;

/* Targets are the series close prices on the frame dates. */
TAFS_API tafs_status tafs_dataset_make(const tafs_frame* frame, const tafs_series* series, size_t window,
                                       size_t horizon, tafs_dataset** out);
TAFS_API tafs_status tafs_dataset_from_arrays(const double* X, const double* y, size_t rows, size_t cols,
                                              const char* const* names, tafs_dataset** out);
TAFS_API tafs_status tafs_dataset_read(const char* path, tafs_dataset** out);
TAFS_API tafs_status tafs_dataset_write(const tafs_dataset* data, const char* path);
/* Chronological train/test cut (seeded shuffle when shuffle != 0), then
 * min-max scaling fitted on the training rows when scale != 0. */
TAFS_API tafs_status tafs_dataset_split(const tafs_dataset* data, double train_fraction, int shuffle, uint64_t seed,
                                        int scale, tafs_dataset** train, tafs_dataset** test);
TAFS_API size_t tafs_dataset_rows(const tafs_dataset* data);
TAFS_API size_t tafs_dataset_cols(const tafs_dataset* data);
TAFS_API const char* tafs_dataset_feature_name(const tafs_dataset* data, size_t col);
TAFS_API double tafs_dataset_x(const tafs_dataset* data, size_t row, size_t col);
TAFS_API double tafs_dataset_y(const tafs_dataset* data, size_t row);
TAFS_API void tafs_dataset_free(tafs_dataset* data);

/* ---- regressors ------------------------------------------------------ */

typedef struct tafs_regressor tafs_regressor;
typedef struct tafs_model tafs_model;

/* family: LR Ridge Lasso DTR KNN MLP SVR ADA GBR RFR (any case). With
 * tuned != 0 the tuned hyperparameters are preloaded. */
TAFS_API tafs_status tafs_regressor_create(const char* family, uint64_t seed, int tuned, tafs_regressor** out);
TAFS_API tafs_status tafs_regressor_set(tafs_regressor* config, const char* key, const char* value);
/* Caps ensemble sizes at `cap`. */
TAFS_API tafs_status tafs_regressor_fast(tafs_regressor* config, size_t cap);
TAFS_API tafs_status tafs_regressor_validate(const tafs_regressor* config);
TAFS_API void tafs_regressor_free(tafs_regressor* config);

TAFS_API tafs_status tafs_model_fit(const tafs_regressor* config, const tafs_dataset* data, tafs_model** out);
/* `out` receives tafs_dataset_rows(data) predictions. */
TAFS_API tafs_status tafs_model_predict(const tafs_model* model, const tafs_dataset* data, double* out);
TAFS_API tafs_status tafs_model_save(const tafs_model* model, const char* path);
TAFS_API tafs_status tafs_model_load(const char* path, tafs_model** out);
TAFS_API const char* tafs_model_family(const tafs_model* model);
TAFS_API size_t tafs_model_features(const tafs_model* model);
TAFS_API size_t tafs_model_warning_count(const tafs_model* model);
TAFS_API const char* tafs_model_warning(const tafs_model* model, size_t i);
TAFS_API void tafs_model_free(tafs_model* model);

/* Number of model fits performed by this process. */
TAFS_API uint64_t tafs_fit_count(void);

/* ---- metrics --------------------------------------------------------- */

typedef struct tafs_metrics {
    double r2;
    double mse;
    double rmse;
    double mae;
    double mape;          /* percent; NaN when every |y| is below the guard */
    size_t mape_skipped;  /* entries left out of mape */
    size_t n;
} tafs_metrics;

TAFS_API tafs_status tafs_metrics_compute(const double* y, const double* yhat, size_t n, tafs_metrics* out);

/* Repeated shuffled K-fold over a grid given as "key=v1,v2;key2=v3".
 * Writes one CSV row per candidate (params, mean, stdev, fold scores) and
 * stores the best candidate index in *best. */
TAFS_API tafs_status tafs_grid_search(const tafs_regressor* base, const tafs_dataset* data, const char* grid,
                                      size_t folds, size_t repeats, const char* metric, uint64_t seed,
                                      const char* csv_path, size_t* best);

/* ---- feature selection ----------------------------------------------- */

typedef struct tafs_selection tafs_selection;

typedef struct tafs_selection_options {
    const char* method;   /* "sfs" or "sbs" */
    const char* metric;   /* r2 mse rmse mae mape */
    size_t cv_folds;
    int cv_shuffle;
    int group_by_indicator;
    size_t max_steps;     /* 0 = full path */
    uint64_t seed;
    size_t threads;
} tafs_selection_options;

TAFS_API void tafs_selection_options_init(tafs_selection_options* options);
TAFS_API tafs_status tafs_selection_run(const tafs_dataset* data, const tafs_regressor* config,
                                        const tafs_selection_options* options, tafs_selection** out);
TAFS_API tafs_status tafs_selection_read(const char* path, tafs_selection** out);
TAFS_API tafs_status tafs_selection_write(const tafs_selection* selection, const char* path);
TAFS_API double tafs_selection_best_score(const tafs_selection* selection);
TAFS_API size_t tafs_selection_best_count(const tafs_selection* selection);
TAFS_API const char* tafs_selection_best_label(const tafs_selection* selection, size_t i);
TAFS_API size_t tafs_selection_fits(const tafs_selection* selection);
/* Keeps only the columns belonging to the selection's best groups. */
TAFS_API tafs_status tafs_dataset_restrict(const tafs_dataset* data, const tafs_selection* selection,
                                           tafs_dataset** out);
TAFS_API void tafs_selection_free(tafs_selection* selection);

/* ---- experiments ----------------------------------------------------- */

typedef struct tafs_experiment tafs_experiment;
typedef void (*tafs_log_fn)(const char* line, void* user);

/* NULL path starts from the defaults. */
TAFS_API tafs_status tafs_experiment_load(const char* path, tafs_experiment** out);
/* `key` is "name" for top-level settings or "section.name". */
TAFS_API tafs_status tafs_experiment_set(tafs_experiment* experiment, const char* key, const char* value);
TAFS_API tafs_status tafs_experiment_run(const tafs_experiment* experiment, tafs_log_fn log, void* user);
TAFS_API const char* tafs_experiment_out_dir(const tafs_experiment* experiment);
TAFS_API void tafs_experiment_free(tafs_experiment* experiment);

/* Re-renders census and plots from an existing output directory. */
TAFS_API tafs_status tafs_report_rebuild(const char* out_dir, tafs_log_fn log, void* user);

#ifdef __cplusplus
}
#endif

#endif

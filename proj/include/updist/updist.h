#ifndef UPDIST_UPDIST_H
#define UPDIST_UPDIST_H

#include <stddef.h>
#include <stdint.h>

#if defined(UPDIST_BUILDING_LIBRARY)
#define UPD_API __attribute__((visibility("default")))
#else
#define UPD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum upd_status {
  UPD_OK = 0,
  UPD_ERR_RUN = 1,
  UPD_ERR_CONFIG = 2,
  UPD_ERR_INVALID_ARGUMENT = 3,
  UPD_ERR_NUMERIC = 4,
  UPD_ERR_IO = 5,
  UPD_ERR_INTERNAL = 6
} upd_status;

typedef struct upd_dataset upd_dataset;
typedef struct upd_model upd_model;
typedef struct upd_up upd_up;

/* Message of the last failing call on this thread; empty after success. */
UPD_API const char* upd_last_error(void);
UPD_API const char* upd_version(void);
UPD_API void upd_string_free(char* s);

/* Points are row-major n x p. Bounds are arrays of length p. */
UPD_API upd_status upd_dataset_create(const double* points, const double* values, size_t n, size_t p,
                                      const double* lower, const double* upper, upd_dataset** out);
/* CSV with header x1..xp,y; bounds as "lo:hi,lo:hi,...". */
UPD_API upd_status upd_dataset_load_csv(const char* path, const char* bounds, upd_dataset** out);
UPD_API upd_status upd_dataset_size(const upd_dataset* data, size_t* n, size_t* p);
UPD_API void upd_dataset_free(upd_dataset* data);

/* spec_json: a family name ("kriging") or an object such as
   {"family":"kriging","covariance":"matern52"}. NULL selects kriging. */
UPD_API upd_status upd_model_fit(const upd_dataset* data, const char* spec_json, upd_model** out);
UPD_API upd_status upd_model_predict(const upd_model* model, const double* x, double* mean, double* variance);
/* Caller frees *json_out with upd_string_free. */
UPD_API upd_status upd_model_describe(const upd_model* model, char** json_out);
UPD_API void upd_model_free(upd_model* model);

/* Leave-one-out ensemble of the model with UP weights.
   up_json: NULL or {"rho":"dbar"} / {"rho":0.5}. */
UPD_API upd_status upd_up_create(const upd_model* model, const char* up_json, upd_up** out);
/* weights and predictions may be NULL; otherwise they receive n values. */
UPD_API upd_status upd_up_eval(const upd_up* up, const double* x, double* mean, double* variance, double* weights,
                               double* predictions);
UPD_API upd_status upd_up_rho(const upd_up* up, double* rho);
/* criterion_json: {"criterion":"up_ei", ...}. */
UPD_API upd_status upd_criterion_eval(const upd_up* up, const char* criterion_json, const double* x, double* value);
UPD_API void upd_up_free(upd_up* up);

/* Maximin Latin hypercube; out receives n x p row-major. */
UPD_API upd_status upd_lhs(size_t n, size_t p, uint64_t seed, const double* lower, const double* upper,
                           double* out);
/* values may be NULL. */
UPD_API upd_status upd_write_design_csv(const char* path, const double* points, const double* values, size_t n,
                                        size_t p);

/* lower/upper may be NULL; otherwise they receive p values. */
UPD_API upd_status upd_benchmark_info(const char* name, size_t* p, double* lower, double* upper);
UPD_API upd_status upd_benchmark_eval(const char* name, const double* x, size_t p, double* value);

/* subcommand: refine | optimize | invert | external. jobs 0 uses the config value.
   Returns UPD_ERR_RUN when any run failed; its outputs are still written. */
UPD_API upd_status upd_run_campaign(const char* subcommand, const char* config_path, const char* out_dir,
                                    size_t jobs, int64_t seed_offset, size_t* runs, size_t* failures);
UPD_API upd_status upd_validate_file(const char* path);

#ifdef __cplusplus
}
#endif

#endif

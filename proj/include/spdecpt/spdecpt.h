/* C API for the SPDE volatility change-point toolkit.
 *
 * All functions return SPDECPT_OK (0) on success; on failure they return a
 * status code and leave a message readable through spdecpt_last_error()
 * (thread-local, valid until the next call on the same thread). Strings
 * returned through char** out-parameters are heap-allocated and must be
 * released with spdecpt_string_free(); datasets with spdecpt_dataset_free().
 */
#ifndef SPDECPT_H
#define SPDECPT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spdecpt_status {
    SPDECPT_OK = 0,
    SPDECPT_ERR_INVALID_ARGUMENT = 1,
    SPDECPT_ERR_CONFIG = 2,
    SPDECPT_ERR_ALIGNMENT = 3,
    SPDECPT_ERR_IO = 4,
    SPDECPT_ERR_FORMAT = 5,
    SPDECPT_ERR_CONVERGENCE = 6,
    SPDECPT_ERR_QUADRATURE = 7,
    SPDECPT_ERR_EXPERIMENT = 8,
    SPDECPT_ERR_INTERNAL = 9
} spdecpt_status;

/* Opaque handle over an observed space-time dataset. */
typedef struct spdecpt_dataset spdecpt_dataset;

const char* spdecpt_version(void);
const char* spdecpt_last_error(void);
void spdecpt_string_free(char* s);
void spdecpt_dataset_free(spdecpt_dataset* ds);

/* Simulation config JSON:
 * {"params": {"theta0":0, "theta1": [0.2], "theta2": 0.2},
 *  "noise": {"alpha": 0, "gamma": "cylindrical"},
 *  "profile": {"change_points": [0.5], "levels": [1, 1.8]},
 *  "grid": {"N": 2000, "M": [500]},
 *  "truncation": [2000], "seed": 1, "replication": 0}
 */
spdecpt_status spdecpt_simulate(const char* config_json, spdecpt_dataset** out);

spdecpt_status spdecpt_dataset_load(const char* path, spdecpt_dataset** out);
spdecpt_status spdecpt_dataset_save(const spdecpt_dataset* ds, const char* path);
spdecpt_status spdecpt_dataset_export_csv(const spdecpt_dataset* ds,
                                          const char* path);
spdecpt_status spdecpt_dataset_meta(const spdecpt_dataset* ds, char** json_out);

/* Estimation options JSON:
 * {"method": "rv"|"di"|"ti", "b": 0.05, "m": [50],
 *  "optimizer": {"box": [[-10,10],[1e-4,100]], "coarse_grid": 17,
 *                "refine_tol": 1e-10, "max_evals": 100000}}     (optimizer optional)
 * Returns the estimate record as JSON.
 */
spdecpt_status spdecpt_estimate(const spdecpt_dataset* ds,
                                const char* options_json, char** json_out);

/* Test options JSON:
 * {"ell": [1], "n": 400, "level": 0.05, "beta": "total-qv"|"regression",
 *  "kappa": [1.0]}                       (oracle / externally estimated)
 * or {"method": "rv"|"di", "b": 0.05, "m": [50], ...}.
 * Returns the test result as JSON.
 */
spdecpt_status spdecpt_test_dataset(const spdecpt_dataset* ds,
                                    const char* options_json, char** json_out);

/* Reconstructed coordinate path and its partial quadratic variation as CSV
 * (columns i,t,value,S), same options as spdecpt_test_dataset. */
spdecpt_status spdecpt_coordinate_path(const spdecpt_dataset* ds,
                                       const char* options_json,
                                       char** csv_out);

/* Test a bare coordinate path; options {"level": 0.05, "beta_sq": ...}
 * (beta_sq optional; defaults to the path's total quadratic variation). */
spdecpt_status spdecpt_test_path_values(const double* values, size_t count,
                                        const char* options_json,
                                        char** json_out);

spdecpt_status spdecpt_kolmogorov_cdf(double x, double* out);
spdecpt_status spdecpt_kolmogorov_quantile(double p, double* out);

/* Runs a Monte Carlo experiment from an experiment-config JSON and writes
 * power.csv, t_samples.csv, ecdf.csv and manifest.json into out_dir.
 * Returns the manifest as JSON when summary_json_out is non-NULL. */
spdecpt_status spdecpt_mc_run(const char* config_json, const char* out_dir,
                              char** summary_json_out);

#ifdef __cplusplus
}
#endif

#endif /* SPDECPT_H */

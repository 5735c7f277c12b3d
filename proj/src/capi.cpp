#include "spdecpt/spdecpt.h"

#include <cstring>
#include <new>
#include <string>

#include "spdecpt/common.hpp"
#include "spdecpt/config_json.hpp"
#include "spdecpt/cpt.hpp"
#include "spdecpt/harness.hpp"
#include "spdecpt/simulator.hpp"

struct spdecpt_dataset {
    spdecpt::FieldDataset impl;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

spdecpt_status fail(spdecpt_status code, const char* message) {
    g_last_error = message;
    return code;
}

// Maps the library's exception types onto status codes.
template <typename Fn>
spdecpt_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const spdecpt::AlignmentError& e) {
        return fail(SPDECPT_ERR_ALIGNMENT, e.what());
    } catch (const spdecpt::ConfigError& e) {
        return fail(SPDECPT_ERR_CONFIG, e.what());
    } catch (const spdecpt::FormatError& e) {
        return fail(SPDECPT_ERR_FORMAT, e.what());
    } catch (const spdecpt::ConvergenceError& e) {
        return fail(SPDECPT_ERR_CONVERGENCE, e.what());
    } catch (const spdecpt::QuadratureError& e) {
        return fail(SPDECPT_ERR_QUADRATURE, e.what());
    } catch (const spdecpt::ExperimentError& e) {
        return fail(SPDECPT_ERR_EXPERIMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SPDECPT_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SPDECPT_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SPDECPT_ERR_INTERNAL, "unknown error");
    }
}

spdecpt_status require(bool ok, const char* message) {
    return ok ? SPDECPT_OK : fail(SPDECPT_ERR_INVALID_ARGUMENT, message);
}

spdecpt_status emit(char** out, const std::string& body) {
    *out = dup_string(body);
    return *out != nullptr ? SPDECPT_OK
                           : fail(SPDECPT_ERR_INTERNAL, "out of memory");
}

}  // namespace

extern "C" {

const char* spdecpt_version(void) { return spdecpt::kVersion; }

const char* spdecpt_last_error(void) { return g_last_error.c_str(); }

void spdecpt_string_free(char* s) { delete[] s; }

void spdecpt_dataset_free(spdecpt_dataset* ds) { delete ds; }

spdecpt_status spdecpt_simulate(const char* config_json,
                                spdecpt_dataset** out) {
    if (auto s = require(config_json && out, "null argument")) return s;
    return guarded([&] {
        auto cfg = spdecpt::parse_simulation_config(config_json);
        auto* handle = new spdecpt_dataset{spdecpt::simulate_field(cfg)};
        *out = handle;
        return SPDECPT_OK;
    });
}

spdecpt_status spdecpt_dataset_load(const char* path, spdecpt_dataset** out) {
    if (auto s = require(path && out, "null argument")) return s;
    return guarded([&] {
        *out = new spdecpt_dataset{spdecpt::load_dataset(path)};
        return SPDECPT_OK;
    });
}

spdecpt_status spdecpt_dataset_save(const spdecpt_dataset* ds,
                                    const char* path) {
    if (auto s = require(ds && path, "null argument")) return s;
    return guarded([&] {
        spdecpt::save_dataset(ds->impl, path);
        return SPDECPT_OK;
    });
}

spdecpt_status spdecpt_dataset_export_csv(const spdecpt_dataset* ds,
                                          const char* path) {
    if (auto s = require(ds && path, "null argument")) return s;
    return guarded([&] {
        spdecpt::export_dataset_csv(ds->impl, path);
        return SPDECPT_OK;
    });
}

spdecpt_status spdecpt_dataset_meta(const spdecpt_dataset* ds,
                                    char** json_out) {
    if (auto s = require(ds && json_out, "null argument")) return s;
    return guarded(
        [&] { return emit(json_out, spdecpt::dataset_meta_json(ds->impl)); });
}

spdecpt_status spdecpt_estimate(const spdecpt_dataset* ds,
                                const char* options_json, char** json_out) {
    if (auto s = require(ds && options_json && json_out, "null argument"))
        return s;
    return guarded([&] {
        return emit(json_out, spdecpt::run_estimate_json(ds->impl, options_json));
    });
}

spdecpt_status spdecpt_test_dataset(const spdecpt_dataset* ds,
                                    const char* options_json,
                                    char** json_out) {
    if (auto s = require(ds && options_json && json_out, "null argument"))
        return s;
    return guarded([&] {
        return emit(json_out, spdecpt::run_test_json(ds->impl, options_json));
    });
}

spdecpt_status spdecpt_coordinate_path(const spdecpt_dataset* ds,
                                       const char* options_json,
                                       char** csv_out) {
    if (auto s = require(ds && options_json && csv_out, "null argument"))
        return s;
    return guarded([&] {
        return emit(csv_out,
                    spdecpt::coordinate_path_csv(ds->impl, options_json));
    });
}

spdecpt_status spdecpt_test_path_values(const double* values, size_t count,
                                        const char* options_json,
                                        char** json_out) {
    if (auto s = require(values && options_json && json_out && count >= 2,
                         "need at least two path values"))
        return s;
    return guarded([&] {
        std::vector<double> v(values, values + count);
        return emit(json_out,
                    spdecpt::run_test_on_values_json(v, options_json));
    });
}

spdecpt_status spdecpt_kolmogorov_cdf(double x, double* out) {
    if (auto s = require(out != nullptr, "null argument")) return s;
    return guarded([&] {
        *out = spdecpt::kolmogorov_cdf(x);
        return SPDECPT_OK;
    });
}

spdecpt_status spdecpt_kolmogorov_quantile(double p, double* out) {
    if (auto s = require(out != nullptr, "null argument")) return s;
    return guarded([&] {
        *out = spdecpt::kolmogorov_quantile(p);
        return SPDECPT_OK;
    });
}

spdecpt_status spdecpt_mc_run(const char* config_json, const char* out_dir,
                              char** summary_json_out) {
    if (auto s = require(config_json && out_dir, "null argument")) return s;
    return guarded([&] {
        const auto cfg = spdecpt::parse_experiment_config(config_json);
        const auto res = spdecpt::run_experiment(cfg);
        spdecpt::export_results(cfg, res, out_dir);
        if (summary_json_out)
            return emit(summary_json_out,
                        spdecpt::experiment_manifest_json(cfg, res));
        return SPDECPT_OK;
    });
}

}  // extern "C"

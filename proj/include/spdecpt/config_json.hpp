#pragma once

#include <string>

#include "spdecpt/harness.hpp"
#include "spdecpt/simulator.hpp"

namespace spdecpt {

// JSON wire formats for the library surface: simulation configs, experiment
// configs, estimate/test options and result records.

SimulationConfig parse_simulation_config(const std::string& json_text);
std::string simulation_config_json(const SimulationConfig& cfg);

ExperimentConfig parse_experiment_config(const std::string& json_text);
std::string experiment_config_json(const ExperimentConfig& cfg);

// Hash of the canonical config dump; stable across runs, changes with any
// config field.
std::uint64_t experiment_config_hash(const ExperimentConfig& cfg);

std::string experiment_manifest_json(const ExperimentConfig& cfg,
                                     const ExperimentResult& res);

// {"method": "rv"|"di"|"ti", "b":..., "m":[...], "optimizer": {...}} ->
// estimation run on a dataset; returns the estimate record as JSON.
std::string run_estimate_json(const FieldDataset& ds,
                              const std::string& options_json);

// Options for a single test on a dataset: ell, n, level, beta convention,
// and the kappa source (explicit "kappa" or "method" + plan fields).
struct TestOptions {
    ModeIndex ell;
    std::optional<std::int64_t> n;
    double level = 0.05;
    BetaConvention beta = BetaConvention::TotalQv;
    std::optional<std::vector<double>> kappa;  // explicit (oracle) value
    std::optional<std::string> method;         // "rv" | "di"
    std::optional<double> b;
    std::vector<std::int64_t> m;
    OptimizerConfig optimizer;
};

TestOptions parse_test_options(const std::string& options_json, int dimension);
std::string run_test_json(const FieldDataset& ds,
                          const std::string& options_json);
std::string coordinate_path_csv(const FieldDataset& ds,
                                const std::string& options_json);

// Test a bare coordinate path (e.g. parsed from CSV): options need only
// level and optionally beta_sq.
std::string run_test_on_values_json(const std::vector<double>& values,
                                    const std::string& options_json);

std::string estimate_record_json(const EstimateRecord& rec,
                                 std::uint64_t config_hash);

std::string dataset_meta_json(const FieldDataset& ds);

}  // namespace spdecpt

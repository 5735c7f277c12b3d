#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spdecpt/cpt.hpp"
#include "spdecpt/estimation.hpp"
#include "spdecpt/model.hpp"
#include "spdecpt/optimizer.hpp"
#include "spdecpt/simulator.hpp"

namespace spdecpt {

enum class RunMode { Full, Coordinate };
enum class EstimatorChoice { OracleKappa, RealizedVariance, DoubleIncrement, TripleIncrement };
enum class BetaConvention { TotalQv, Regression };

std::string to_string(RunMode m);
std::string to_string(EstimatorChoice e);
std::string to_string(BetaConvention b);
RunMode run_mode_from_string(const std::string& s);
EstimatorChoice estimator_from_string(const std::string& s);
BetaConvention beta_convention_from_string(const std::string& s);

// One volatility scenario of a sweep (e.g. one sigma2 or tau value).
struct ProfileCase {
    std::string label;
    VolatilityProfile profile;
};

// Everything one Monte Carlo experiment needs. The coordinate mode skips
// field assembly and reconstruction and drives the test straight off the
// simulated coordinate process (its beta-hat is always the total QV).
struct ExperimentConfig {
    OperatorParams params;
    NoiseSpec noise;
    std::vector<ProfileCase> cases;
    SpaceTimeGrid grid;
    std::vector<std::int64_t> truncation;
    RunMode mode = RunMode::Coordinate;
    ModeIndex ell;
    EstimatorChoice estimator = EstimatorChoice::OracleKappa;
    BetaConvention beta = BetaConvention::TotalQv;
    std::optional<ThinningPlan> estimation_plan;  // spatial b, m
    std::vector<std::int64_t> test_n;
    double level = 0.05;
    std::int64_t replications = 200;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    OptimizerConfig optimizer;  // empty box = per-method defaults

    void validate() const;
};

struct EstimateRecord {
    std::string estimator;
    std::vector<double> kappa;
    std::optional<double> theta2;
    std::optional<double> v;
    std::optional<double> v0;
    std::optional<double> alpha;
    double objective = 0.0;
    std::int64_t evals = 0;
};

struct ReplicationOutcome {
    bool ok = false;
    std::string error;
    std::vector<TestResult> results;  // one per entry of test_n
    EstimateRecord estimate;
};

// One full pipeline pass; deterministic given (config, case, replication).
ReplicationOutcome run_replication(const ExperimentConfig& cfg,
                                   std::size_t case_index,
                                   std::uint32_t replication);

struct PowerCell {
    std::int64_t replications = 0;  // configured minus failures
    std::int64_t failures = 0;
    std::int64_t rejections = 0;
    double rate = 0.0;
};

struct PowerTable {
    std::vector<std::string> labels;
    std::vector<std::int64_t> n_values;
    std::vector<std::vector<PowerCell>> cells;  // [label][n]

    const PowerCell& at(std::size_t label_idx, std::size_t n_idx) const {
        return cells[label_idx][n_idx];
    }
};

struct ExperimentResult {
    PowerTable table;
    // T_n samples per (label, n); failed replications carry NaN.
    std::vector<std::vector<std::vector<double>>> t_samples;
    std::int64_t failed_replications = 0;
    std::int64_t total_replications = 0;
    double wall_time_seconds = 0.0;
};

// Runs all replications of all cases on a bounded worker pool, then reduces
// in replication order, so aggregates do not depend on scheduling. Raises
// ExperimentError when more than 5% of replications fail.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Writes power-table CSV, T_n sample CSV, per-group ECDF CSV (with the
// theoretical CDF column) and a run manifest JSON into out_dir.
void export_results(const ExperimentConfig& cfg, const ExperimentResult& res,
                    const std::string& out_dir);

std::string power_table_csv(const PowerTable& table);
PowerTable parse_power_table_csv(const std::string& csv);

}  // namespace spdecpt

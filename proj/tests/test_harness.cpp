#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "spdecpt/common.hpp"
#include "spdecpt/config_json.hpp"
#include "spdecpt/harness.hpp"

using namespace spdecpt;

namespace {

ExperimentConfig coordinate_config(std::uint64_t seed) {
    ExperimentConfig cfg{OperatorParams(0.0, {0.2}, 0.2),
                         NoiseSpec::cylindrical(),
                         {{"null", VolatilityProfile::constant(1.0)}},
                         SpaceTimeGrid(500, {16}),
                         {1},
                         RunMode::Coordinate,
                         {1},
                         EstimatorChoice::OracleKappa,
                         BetaConvention::TotalQv,
                         std::nullopt,
                         {50, 100},
                         0.05,
                         40,
                         seed,
                         1,
                         {}};
    return cfg;
}

}  // namespace

TEST_CASE("replications are deterministic") {
    const ExperimentConfig cfg = coordinate_config(99);
    const ReplicationOutcome a = run_replication(cfg, 0, 7);
    const ReplicationOutcome b = run_replication(cfg, 0, 7);
    REQUIRE(a.ok);
    REQUIRE(a.results.size() == 2);
    CHECK(a.results[0].t_n == b.results[0].t_n);
    CHECK(a.results[1].t_n == b.results[1].t_n);
    CHECK(a.results[0].k_star == b.results[0].k_star);
    CHECK(std::isfinite(a.results[0].t_n));

    const ReplicationOutcome c = run_replication(cfg, 0, 8);
    CHECK(c.results[0].t_n != a.results[0].t_n);
}

TEST_CASE("full-path oracle smoke run completes") {
    ExperimentConfig cfg{OperatorParams(0.0, {0.2}, 0.2),
                         NoiseSpec::cylindrical(),
                         {{"null", VolatilityProfile::constant(1.0)}},
                         SpaceTimeGrid(200, {64}),
                         {32},
                         RunMode::Full,
                         {1},
                         EstimatorChoice::OracleKappa,
                         BetaConvention::TotalQv,
                         std::nullopt,
                         {50},
                         0.05,
                         3,
                         11,
                         1,
                         {}};
    const ReplicationOutcome out = run_replication(cfg, 0, 0);
    REQUIRE(out.ok);
    CHECK(std::isfinite(out.results[0].t_n));
    CHECK(out.results[0].t_n >= 0.0);
    CHECK(out.estimate.estimator == "oracle");
}

TEST_CASE("aggregates are independent of the worker count") {
    ExperimentConfig cfg = coordinate_config(1234);
    cfg.threads = 1;
    const ExperimentResult a = run_experiment(cfg);
    cfg.threads = 3;
    const ExperimentResult b = run_experiment(cfg);
    REQUIRE(a.table.cells.size() == b.table.cells.size());
    for (std::size_t c = 0; c < a.table.cells.size(); ++c)
        for (std::size_t t = 0; t < a.table.cells[c].size(); ++t) {
            CHECK(a.table.cells[c][t].rejections ==
                  b.table.cells[c][t].rejections);
            CHECK(a.table.cells[c][t].rate == b.table.cells[c][t].rate);
        }
    CHECK(a.t_samples == b.t_samples);
}

TEST_CASE("manual replication order reproduces the experiment aggregate") {
    const ExperimentConfig cfg = coordinate_config(5);
    const ExperimentResult res = run_experiment(cfg);
    std::int64_t rejections = 0;
    for (std::int64_t rep = cfg.replications - 1; rep >= 0; --rep) {
        const ReplicationOutcome o =
            run_replication(cfg, 0, static_cast<std::uint32_t>(rep));
        if (o.results[0].reject) ++rejections;
    }
    CHECK(rejections == res.table.cells[0][0].rejections);
}

TEST_CASE("full path with estimated kappa and regression beta completes") {
    ExperimentConfig cfg{OperatorParams(0.0, {0.2}, 0.2),
                         NoiseSpec::cylindrical(),
                         {{"step", VolatilityProfile({0.5}, {1.0, 1.8})}},
                         SpaceTimeGrid(400, {100}),
                         {64},
                         RunMode::Full,
                         {1},
                         EstimatorChoice::DoubleIncrement,
                         BetaConvention::Regression,
                         ThinningPlan(0.1, {10}),
                         {100},
                         0.05,
                         2,
                         321,
                         1,
                         {}};
    const ReplicationOutcome out = run_replication(cfg, 0, 0);
    REQUIRE(out.ok);
    CHECK(out.estimate.estimator == "di");
    CHECK(out.estimate.theta2.has_value());
    CHECK(out.estimate.v.has_value());
    CHECK(out.results[0].beta_sq == doctest::Approx(*out.estimate.v));
    CHECK(std::isfinite(out.results[0].t_n));
}

TEST_CASE("failed replications are recorded, excess failure aborts") {
    // A one-evaluation budget makes every estimation fail.
    ExperimentConfig cfg{OperatorParams(0.0, {0.2}, 0.2),
                         NoiseSpec::cylindrical(),
                         {{"null", VolatilityProfile::constant(1.0)}},
                         SpaceTimeGrid(100, {100}),
                         {16},
                         RunMode::Full,
                         {1},
                         EstimatorChoice::RealizedVariance,
                         BetaConvention::TotalQv,
                         ThinningPlan(0.1, {10}),
                         {50},
                         0.05,
                         4,
                         7,
                         1,
                         {}};
    cfg.optimizer.max_evals = 1;
    const ReplicationOutcome out = run_replication(cfg, 0, 0);
    CHECK_FALSE(out.ok);
    CHECK_FALSE(out.error.empty());
    CHECK_THROWS_AS(run_experiment(cfg), ExperimentError);
}

TEST_CASE("power is monotone in effect size and n (median over seeds)") {
    const std::vector<double> sigma2{1.25, 1.8};
    const std::vector<std::int64_t> test_n{40, 160};
    std::vector<std::vector<std::vector<double>>> rates(
        5, std::vector<std::vector<double>>(2, std::vector<double>(2)));
    for (int s = 0; s < 5; ++s) {
        ExperimentConfig cfg{OperatorParams(0.0, {0.2}, 0.2),
                             NoiseSpec::cylindrical(),
                             {{"s1.25", VolatilityProfile({0.5}, {1.0, 1.25})},
                              {"s1.8", VolatilityProfile({0.5}, {1.0, 1.8})}},
                             SpaceTimeGrid(960, {16}),
                             {1},
                             RunMode::Coordinate,
                             {1},
                             EstimatorChoice::OracleKappa,
                             BetaConvention::TotalQv,
                             std::nullopt,
                             test_n,
                             0.05,
                             60,
                             1000 + static_cast<std::uint64_t>(s),
                             1,
                             {}};
        const ExperimentResult res = run_experiment(cfg);
        for (int c = 0; c < 2; ++c)
            for (int t = 0; t < 2; ++t)
                rates[s][c][t] = res.table.cells[c][t].rate;
    }
    const auto median = [&](int c, int t) {
        std::vector<double> v;
        for (int s = 0; s < 5; ++s) v.push_back(rates[s][c][t]);
        std::sort(v.begin(), v.end());
        return v[2];
    };
    CHECK(median(1, 0) >= median(0, 0));  // effect size at n = 40
    CHECK(median(1, 1) >= median(0, 1));  // effect size at n = 160
    CHECK(median(0, 1) >= median(0, 0));  // n at sigma2 = 1.25
    CHECK(median(1, 1) >= median(1, 0));  // n at sigma2 = 1.8
}

TEST_CASE("result export") {
    const ExperimentConfig cfg = coordinate_config(77);
    const ExperimentResult res = run_experiment(cfg);
    const auto dir =
        std::filesystem::temp_directory_path() / "spdecpt_export_test";
    std::filesystem::remove_all(dir);
    export_results(cfg, res, dir.string());

    SUBCASE("power CSV round-trips") {
        std::ifstream in(dir / "power.csv");
        std::stringstream ss;
        ss << in.rdbuf();
        const PowerTable back = parse_power_table_csv(ss.str());
        REQUIRE(back.labels == res.table.labels);
        REQUIRE(back.n_values == res.table.n_values);
        for (std::size_t c = 0; c < back.cells.size(); ++c)
            for (std::size_t t = 0; t < back.cells[c].size(); ++t) {
                CHECK(back.cells[c][t].rejections ==
                      res.table.cells[c][t].rejections);
                CHECK(back.cells[c][t].rate ==
                      doctest::Approx(res.table.cells[c][t].rate));
            }
    }
    SUBCASE("ecdf carries the theoretical CDF column") {
        std::ifstream in(dir / "ecdf.csv");
        std::string line;
        std::getline(in, line);
        CHECK(line == "label,n,t_n,ecdf,kolmogorov_cdf");
        int checked = 0;
        while (std::getline(in, line) && checked < 20) {
            std::istringstream row(line);
            std::string label, field;
            std::getline(row, label, ',');
            std::getline(row, field, ',');
            std::getline(row, field, ',');
            const double t = std::stod(field);
            std::getline(row, field, ',');
            const double ecdf = std::stod(field);
            std::getline(row, field, ',');
            const double theo = std::stod(field);
            CHECK(theo == doctest::Approx(kolmogorov_cdf(t)).epsilon(1e-12));
            CHECK(ecdf > 0.0);
            CHECK(ecdf <= 1.0);
            ++checked;
        }
        CHECK(checked > 0);
    }
    SUBCASE("manifest hash tracks the config") {
        std::ifstream in(dir / "manifest.json");
        const auto manifest = nlohmann::json::parse(in);
        std::ostringstream expect;
        expect << std::hex << experiment_config_hash(cfg);
        CHECK(manifest.at("config_hash").get<std::string>() == expect.str());
        CHECK(manifest.at("total_replications").get<std::int64_t>() ==
              res.total_replications);

        ExperimentConfig changed = cfg;
        changed.level = 0.01;
        CHECK(experiment_config_hash(changed) != experiment_config_hash(cfg));
        CHECK(experiment_config_hash(cfg) == experiment_config_hash(cfg));
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("experiment config JSON round-trips") {
    ExperimentConfig cfg = coordinate_config(31);
    cfg.estimation_plan = ThinningPlan(0.1, {10});
    const std::string text = experiment_config_json(cfg);
    const ExperimentConfig back = parse_experiment_config(text);
    CHECK(experiment_config_json(back) == text);
    CHECK(back.seed == cfg.seed);
    CHECK(back.test_n == cfg.test_n);
    CHECK(back.cases[0].label == cfg.cases[0].label);
    CHECK(back.estimation_plan->m == cfg.estimation_plan->m);
}

TEST_CASE("config validation rejects inconsistent choices") {
    ExperimentConfig cfg = coordinate_config(1);
    cfg.estimator = EstimatorChoice::RealizedVariance;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);  // fast path needs oracle

    ExperimentConfig reg = coordinate_config(1);
    reg.beta = BetaConvention::Regression;
    CHECK_THROWS_AS(reg.validate(), ConfigError);

    ExperimentConfig full = coordinate_config(1);
    full.mode = RunMode::Full;
    full.estimator = EstimatorChoice::DoubleIncrement;
    CHECK_THROWS_AS(full.validate(), ConfigError);  // needs estimation plan
    full.estimation_plan = ThinningPlan(0.1, {4});
    CHECK_NOTHROW(full.validate());
}

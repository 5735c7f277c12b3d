#include "spdecpt/config_json.hpp"

#include <chrono>
#include <sstream>

#include "json.hpp"
#include "spdecpt/common.hpp"
#include "spdecpt/coordinates.hpp"

namespace spdecpt {
namespace {

using nlohmann::json;

json parse(const std::string& text, const char* who) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string(who) + ": invalid JSON: " + e.what());
    }
}

OperatorParams params_from(const json& j) {
    return OperatorParams(j.at("theta0").get<double>(),
                          j.at("theta1").get<std::vector<double>>(),
                          j.at("theta2").get<double>());
}

json params_to(const OperatorParams& p) {
    return {{"theta0", p.theta0()},
            {"theta1", p.theta1()},
            {"theta2", p.theta2()}};
}

NoiseSpec noise_from(const json& j) {
    return NoiseSpec(j.at("alpha").get<double>(),
                     gamma_rule_from_string(j.at("gamma").get<std::string>()),
                     j.value("mu0", 0.0));
}

json noise_to(const NoiseSpec& n) {
    return {{"alpha", n.alpha()},
            {"gamma", to_string(n.rule())},
            {"mu0", n.mu0()}};
}

VolatilityProfile profile_from(const json& j) {
    return VolatilityProfile(
        j.value("change_points", std::vector<double>{}),
        j.at("levels").get<std::vector<double>>());
}

json profile_to(const VolatilityProfile& p) {
    return {{"change_points", p.change_points()}, {"levels", p.levels()}};
}

SpaceTimeGrid grid_from(const json& j) {
    return SpaceTimeGrid(j.at("N").get<std::int64_t>(),
                         j.at("M").get<std::vector<std::int64_t>>());
}

json grid_to(const SpaceTimeGrid& g) { return {{"N", g.N}, {"M", g.M}}; }

OptimizerConfig optimizer_from(const json& j) {
    OptimizerConfig cfg;
    if (j.contains("box"))
        for (const auto& b : j.at("box"))
            cfg.box.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
    cfg.coarse_grid = j.value("coarse_grid", cfg.coarse_grid);
    cfg.refine_tol = j.value("refine_tol", cfg.refine_tol);
    cfg.x_tol = j.value("x_tol", cfg.x_tol);
    cfg.max_evals = j.value("max_evals", cfg.max_evals);
    return cfg;
}

json optimizer_to(const OptimizerConfig& cfg) {
    json j;
    if (!cfg.box.empty()) {
        json box = json::array();
        for (const auto& b : cfg.box) box.push_back({b[0], b[1]});
        j["box"] = box;
    }
    j["coarse_grid"] = cfg.coarse_grid;
    j["refine_tol"] = cfg.refine_tol;
    j["x_tol"] = cfg.x_tol;
    j["max_evals"] = cfg.max_evals;
    return j;
}

ThinningPlan plan_from_fields(const json& j) {
    return ThinningPlan(j.at("b").get<double>(),
                        j.at("m").get<std::vector<std::int64_t>>());
}

}  // namespace

SimulationConfig parse_simulation_config(const std::string& text) {
    const json j = parse(text, "simulation config");
    SimulationConfig cfg{params_from(j.at("params")),
                         noise_from(j.at("noise")),
                         profile_from(j.at("profile")),
                         grid_from(j.at("grid")),
                         j.at("truncation").get<std::vector<std::int64_t>>(),
                         {j.value("seed", std::uint64_t{0}),
                          j.value("replication", std::uint32_t{0})},
                         j.value("initial_coefficient", 0.0)};
    return cfg;
}

std::string simulation_config_json(const SimulationConfig& cfg) {
    json j;
    j["params"] = params_to(cfg.params);
    j["noise"] = noise_to(cfg.noise);
    j["profile"] = profile_to(cfg.profile);
    j["grid"] = grid_to(cfg.grid);
    j["truncation"] = cfg.truncation;
    j["seed"] = cfg.seed.seed;
    j["replication"] = cfg.seed.replication;
    j["initial_coefficient"] = cfg.initial_coefficient;
    return j.dump();
}

ExperimentConfig parse_experiment_config(const std::string& text) {
    const json j = parse(text, "experiment config");
    std::vector<ProfileCase> cases;
    if (j.contains("profiles")) {
        for (const auto& pj : j.at("profiles"))
            cases.push_back(
                {pj.value("label", "case" + std::to_string(cases.size())),
                 profile_from(pj)});
    } else {
        cases.push_back({"profile", profile_from(j.at("profile"))});
    }

    ExperimentConfig cfg{params_from(j.at("params")),
                         noise_from(j.at("noise")),
                         std::move(cases),
                         grid_from(j.at("grid")),
                         j.at("truncation").get<std::vector<std::int64_t>>(),
                         run_mode_from_string(j.value("mode", "coordinate")),
                         j.value("ell", ModeIndex{}),
                         estimator_from_string(j.value("estimator", "oracle")),
                         beta_convention_from_string(
                             j.value("beta", "total-qv")),
                         std::nullopt,
                         j.at("test_n").get<std::vector<std::int64_t>>(),
                         j.value("level", 0.05),
                         j.value("replications", std::int64_t{200}),
                         j.at("seed").get<std::uint64_t>(),
                         j.value("threads", 0u),
                         j.contains("optimizer")
                             ? optimizer_from(j.at("optimizer"))
                             : OptimizerConfig{}};
    if (cfg.ell.empty()) cfg.ell = ModeIndex(cfg.params.dimension(), 1);
    if (j.contains("estimation_plan"))
        cfg.estimation_plan = plan_from_fields(j.at("estimation_plan"));
    return cfg;
}

std::string experiment_config_json(const ExperimentConfig& cfg) {
    json j;
    j["params"] = params_to(cfg.params);
    j["noise"] = noise_to(cfg.noise);
    json cases = json::array();
    for (const auto& pc : cfg.cases) {
        json p = profile_to(pc.profile);
        p["label"] = pc.label;
        cases.push_back(p);
    }
    j["profiles"] = cases;
    j["grid"] = grid_to(cfg.grid);
    j["truncation"] = cfg.truncation;
    j["mode"] = to_string(cfg.mode);
    j["ell"] = cfg.ell;
    j["estimator"] = to_string(cfg.estimator);
    j["beta"] = to_string(cfg.beta);
    if (cfg.estimation_plan) {
        j["estimation_plan"] = {{"b", cfg.estimation_plan->b},
                                {"m", cfg.estimation_plan->m}};
    }
    j["test_n"] = cfg.test_n;
    j["level"] = cfg.level;
    j["replications"] = cfg.replications;
    j["seed"] = cfg.seed;
    j["optimizer"] = optimizer_to(cfg.optimizer);
    return j.dump();
}

std::uint64_t experiment_config_hash(const ExperimentConfig& cfg) {
    return fnv1a64(experiment_config_json(cfg));
}

std::string experiment_manifest_json(const ExperimentConfig& cfg,
                                     const ExperimentResult& res) {
    json j;
    j["config"] = json::parse(experiment_config_json(cfg));
    std::ostringstream hash;
    hash << std::hex << experiment_config_hash(cfg);
    j["config_hash"] = hash.str();
    j["seed"] = cfg.seed;
    j["version"] = kVersion;
    j["wall_time_seconds"] = res.wall_time_seconds;
    j["total_replications"] = res.total_replications;
    j["failed_replications"] = res.failed_replications;
    return j.dump(2);
}

std::string estimate_record_json(const EstimateRecord& rec,
                                 std::uint64_t config_hash) {
    json j;
    j["estimator"] = rec.estimator;
    json point;
    point["kappa"] = rec.kappa;
    if (rec.theta2) point["theta2"] = *rec.theta2;
    if (rec.v) point["v"] = *rec.v;
    if (rec.v0) point["v0"] = *rec.v0;
    if (rec.alpha) point["alpha"] = *rec.alpha;
    j["point"] = point;
    j["objective"] = rec.objective;
    j["evals"] = rec.evals;
    std::ostringstream hash;
    hash << std::hex << config_hash;
    j["config_hash"] = hash.str();
    return j.dump();
}

std::string dataset_meta_json(const FieldDataset& ds) {
    json j;
    j["params"] = params_to(ds.params);
    j["noise"] = noise_to(ds.noise);
    j["profile"] = profile_to(ds.profile);
    j["grid"] = grid_to(ds.grid);
    j["truncation"] = ds.truncation;
    j["seed"] = ds.seed.seed;
    j["replication"] = ds.seed.replication;
    j["initial_coefficient"] = ds.initial_coefficient;
    return j.dump();
}

std::string run_estimate_json(const FieldDataset& ds,
                              const std::string& options_json) {
    const json j = parse(options_json, "estimate options");
    const std::string method = j.at("method").get<std::string>();
    const ThinningPlan plan = plan_from_fields(j);
    const OptimizerConfig cfg = j.contains("optimizer")
                                    ? optimizer_from(j.at("optimizer"))
                                    : OptimizerConfig{};
    const std::uint64_t hash =
        fnv1a64(json({{"method", method},
                      {"b", plan.b},
                      {"m", plan.m},
                      {"optimizer", optimizer_to(cfg)}})
                    .dump());

    EstimateRecord rec;
    rec.estimator = method;
    if (method == "rv") {
        const auto est = fit_realized_variance(ds, plan, cfg);
        rec.kappa = {est.kappa};
        rec.v0 = est.v0;
        rec.objective = est.objective;
        rec.evals = est.evals;
    } else if (method == "di") {
        const auto est = fit_double_increment(ds, plan, cfg);
        rec.kappa = {est.kappa};
        rec.theta2 = est.theta2;
        rec.v = est.v;
        rec.objective = est.objective;
        rec.evals = est.evals;
    } else if (method == "ti") {
        const double alpha_hat = estimate_damping(ds, plan);
        const auto est = fit_triple_increment(ds, plan, alpha_hat, cfg);
        rec.kappa = {est.kappa[0], est.kappa[1]};
        rec.theta2 = est.theta2;
        rec.v = est.v;
        rec.alpha = est.alpha;
        rec.objective = est.objective;
        rec.evals = est.evals;
    } else {
        throw ConfigError("estimate options: unknown method \"" + method +
                          "\" (expected rv, di or ti)");
    }
    return estimate_record_json(rec, hash);
}

TestOptions parse_test_options(const std::string& options_json,
                               int dimension) {
    const json j = parse(options_json, "test options");
    TestOptions opt;
    opt.ell = j.value("ell", ModeIndex(dimension, 1));
    if (j.contains("n")) opt.n = j.at("n").get<std::int64_t>();
    opt.level = j.value("level", 0.05);
    opt.beta = beta_convention_from_string(j.value("beta", "total-qv"));
    if (j.contains("kappa"))
        opt.kappa = j.at("kappa").get<std::vector<double>>();
    if (j.contains("method"))
        opt.method = j.at("method").get<std::string>();
    if (j.contains("b")) opt.b = j.at("b").get<double>();
    if (j.contains("m")) opt.m = j.at("m").get<std::vector<std::int64_t>>();
    if (j.contains("optimizer")) opt.optimizer = optimizer_from(j.at("optimizer"));
    if (!opt.kappa && !opt.method)
        throw ConfigError(
            "test options: provide either an explicit \"kappa\" or an "
            "estimation \"method\"");
    return opt;
}

namespace {

// Resolves kappa (and the regression beta when requested) per the options.
struct ResolvedTestInputs {
    std::vector<double> kappa;
    std::optional<double> regression_beta;
};

ResolvedTestInputs resolve_test_inputs(const FieldDataset& ds,
                                       const TestOptions& opt) {
    ResolvedTestInputs out;
    if (opt.kappa) {
        if (opt.beta == BetaConvention::Regression)
            throw ConfigError(
                "test options: the regression beta convention needs "
                "method \"di\", not an explicit kappa");
        out.kappa = *opt.kappa;
        return out;
    }
    if (!opt.b || opt.m.empty())
        throw ConfigError("test options: estimation needs b and m");
    const ThinningPlan plan(*opt.b, opt.m);
    if (*opt.method == "rv") {
        if (opt.beta == BetaConvention::Regression)
            throw ConfigError(
                "test options: the regression beta convention needs method "
                "\"di\"");
        out.kappa = {fit_realized_variance(ds, plan, opt.optimizer).kappa};
    } else if (*opt.method == "di") {
        const auto est = fit_double_increment(ds, plan, opt.optimizer);
        out.kappa = {est.kappa};
        if (opt.beta == BetaConvention::Regression) out.regression_beta = est.v;
    } else {
        throw ConfigError("test options: unknown method \"" + *opt.method +
                          "\" (expected rv or di)");
    }
    return out;
}

CoordinatePath reconstruct(const FieldDataset& ds, const TestOptions& opt,
                           const std::vector<double>& kappa) {
    const ThinningPlan plan(
        0.25, std::vector<std::int64_t>(ds.dimension(), 1), opt.n);
    return approx_coordinate(ds, opt.ell, kappa, plan);
}

}  // namespace

std::string run_test_json(const FieldDataset& ds,
                          const std::string& options_json) {
    const TestOptions opt = parse_test_options(options_json, ds.dimension());
    const ResolvedTestInputs inputs = resolve_test_inputs(ds, opt);
    const CoordinatePath path = reconstruct(ds, opt, inputs.kappa);
    const QuadraticVariation qv = partial_qv(path);
    const double beta_sq = inputs.regression_beta.value_or(qv.total());
    const TestResult result = decide(t_statistic(qv, beta_sq), opt.level);
    return test_result_json(result);
}

std::string coordinate_path_csv(const FieldDataset& ds,
                                const std::string& options_json) {
    const TestOptions opt = parse_test_options(options_json, ds.dimension());
    const ResolvedTestInputs inputs = resolve_test_inputs(ds, opt);
    const CoordinatePath path = reconstruct(ds, opt, inputs.kappa);
    return path_csv_string(path, partial_qv(path));
}

std::string run_test_on_values_json(const std::vector<double>& values,
                                    const std::string& options_json) {
    const json j = parse(options_json, "test options");
    const double level = j.value("level", 0.05);
    const QuadraticVariation qv = partial_qv(values);
    const double beta_sq = j.value("beta_sq", qv.total());
    const TestResult result = decide(t_statistic(qv, beta_sq), level);
    return test_result_json(result);
}

}  // namespace spdecpt

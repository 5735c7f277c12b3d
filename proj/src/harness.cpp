#include "spdecpt/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "spdecpt/common.hpp"
#include "spdecpt/config_json.hpp"
#include "spdecpt/coordinates.hpp"

namespace spdecpt {

std::string to_string(RunMode m) {
    return m == RunMode::Full ? "full" : "coordinate";
}
std::string to_string(EstimatorChoice e) {
    switch (e) {
        case EstimatorChoice::OracleKappa: return "oracle";
        case EstimatorChoice::RealizedVariance: return "rv";
        case EstimatorChoice::DoubleIncrement: return "di";
        case EstimatorChoice::TripleIncrement: return "ti";
    }
    return "unknown";
}
std::string to_string(BetaConvention b) {
    return b == BetaConvention::TotalQv ? "total-qv" : "regression";
}

RunMode run_mode_from_string(const std::string& s) {
    if (s == "full") return RunMode::Full;
    if (s == "coordinate") return RunMode::Coordinate;
    throw ConfigError("unknown run mode: " + s);
}
EstimatorChoice estimator_from_string(const std::string& s) {
    if (s == "oracle") return EstimatorChoice::OracleKappa;
    if (s == "rv") return EstimatorChoice::RealizedVariance;
    if (s == "di") return EstimatorChoice::DoubleIncrement;
    if (s == "ti") return EstimatorChoice::TripleIncrement;
    throw ConfigError("unknown estimator: " + s);
}
BetaConvention beta_convention_from_string(const std::string& s) {
    if (s == "total-qv") return BetaConvention::TotalQv;
    if (s == "regression") return BetaConvention::Regression;
    throw ConfigError("unknown beta convention: " + s);
}

void ExperimentConfig::validate() const {
    if (cases.empty()) throw ConfigError("experiment: no volatility cases");
    if (test_n.empty()) throw ConfigError("experiment: no test n values");
    for (auto n : test_n)
        if (n < 2 || n > grid.N)
            throw ConfigError("experiment: each test n must lie in [2, N]");
    if (replications < 1)
        throw ConfigError("experiment: replications must be >= 1");
    if (!(level > 0.0 && level < 1.0))
        throw ConfigError("experiment: level must lie in (0,1)");
    if (static_cast<int>(ell.size()) != params.dimension())
        throw ConfigError("experiment: ell dimension mismatch");
    if (static_cast<int>(truncation.size()) != params.dimension())
        throw ConfigError("experiment: truncation dimension mismatch");
    noise.validate_for_dimension(params.dimension());
    if (mode == RunMode::Coordinate &&
        estimator != EstimatorChoice::OracleKappa)
        throw ConfigError(
            "experiment: the coordinate fast path has no estimation stage; "
            "use estimator \"oracle\"");
    if (mode == RunMode::Coordinate && beta == BetaConvention::Regression)
        throw ConfigError(
            "experiment: the coordinate fast path supports only the total-qv "
            "beta convention");
    if (beta == BetaConvention::Regression &&
        estimator != EstimatorChoice::DoubleIncrement)
        throw ConfigError(
            "experiment: the regression beta convention takes V from the "
            "double-increment fit; use estimator \"di\"");
    if (estimator != EstimatorChoice::OracleKappa && !estimation_plan)
        throw ConfigError("experiment: estimator needs an estimation plan");
    if (estimator == EstimatorChoice::TripleIncrement &&
        params.dimension() != 2)
        throw ConfigError("experiment: estimator \"ti\" is for d = 2");
    if ((estimator == EstimatorChoice::RealizedVariance ||
         estimator == EstimatorChoice::DoubleIncrement) &&
        params.dimension() != 1)
        throw ConfigError("experiment: estimators \"rv\"/\"di\" are for d = 1");
}

namespace {

TestResult test_from_values(const std::vector<double>& thinned,
                            std::optional<double> regression_beta,
                            double level) {
    const QuadraticVariation qv = partial_qv(thinned);
    const double beta_sq = regression_beta.value_or(qv.total());
    return decide(t_statistic(qv, beta_sq), level);
}

std::vector<double> thin_path(const std::vector<double>& full, std::int64_t n) {
    const auto N = static_cast<std::int64_t>(full.size()) - 1;
    const std::int64_t stride = N / n;
    std::vector<double> out(n + 1);
    for (std::int64_t i = 0; i <= n; ++i) out[i] = full[i * stride];
    return out;
}

}  // namespace

ReplicationOutcome run_replication(const ExperimentConfig& cfg,
                                   std::size_t case_index,
                                   std::uint32_t replication) {
    ReplicationOutcome out;
    try {
        const ProfileCase& pc = cfg.cases.at(case_index);
        const SeedRecord seed{cfg.seed, replication};
        out.results.reserve(cfg.test_n.size());

        if (cfg.mode == RunMode::Coordinate) {
            const std::vector<double> path = simulate_single_coordinate(
                cfg.params, cfg.noise, pc.profile, cfg.grid.N, cfg.ell,
                cfg.truncation, seed);
            out.estimate.estimator = "oracle";
            out.estimate.kappa = cfg.params.kappa();
            for (auto n : cfg.test_n)
                out.results.push_back(
                    test_from_values(thin_path(path, n), std::nullopt, cfg.level));
            out.ok = true;
            return out;
        }

        const SimulationConfig sim{cfg.params,     cfg.noise, pc.profile,
                                   cfg.grid,       cfg.truncation, seed,
                                   0.0};
        const FieldDataset ds = assemble_field(simulate_coefficients(sim, 1),
                                               sim, 1);

        std::vector<double> kappa_hat;
        std::optional<double> regression_beta;
        out.estimate.estimator = to_string(cfg.estimator);
        switch (cfg.estimator) {
            case EstimatorChoice::OracleKappa:
                kappa_hat = cfg.params.kappa();
                out.estimate.kappa = kappa_hat;
                break;
            case EstimatorChoice::RealizedVariance: {
                const auto est =
                    fit_realized_variance(ds, *cfg.estimation_plan, cfg.optimizer);
                kappa_hat = {est.kappa};
                out.estimate.kappa = kappa_hat;
                out.estimate.v0 = est.v0;
                out.estimate.objective = est.objective;
                out.estimate.evals = est.evals;
                break;
            }
            case EstimatorChoice::DoubleIncrement: {
                const auto est =
                    fit_double_increment(ds, *cfg.estimation_plan, cfg.optimizer);
                kappa_hat = {est.kappa};
                out.estimate.kappa = kappa_hat;
                out.estimate.theta2 = est.theta2;
                out.estimate.v = est.v;
                out.estimate.objective = est.objective;
                out.estimate.evals = est.evals;
                if (cfg.beta == BetaConvention::Regression)
                    regression_beta = est.v;
                break;
            }
            case EstimatorChoice::TripleIncrement: {
                const double alpha_hat =
                    estimate_damping(ds, *cfg.estimation_plan);
                const auto est = fit_triple_increment(
                    ds, *cfg.estimation_plan, alpha_hat, cfg.optimizer);
                kappa_hat = {est.kappa[0], est.kappa[1]};
                out.estimate.kappa = kappa_hat;
                out.estimate.theta2 = est.theta2;
                out.estimate.v = est.v;
                out.estimate.alpha = est.alpha;
                out.estimate.objective = est.objective;
                out.estimate.evals = est.evals;
                break;
            }
        }

        for (auto n : cfg.test_n) {
            ThinningPlan plan(0.25, std::vector<std::int64_t>(ds.dimension(), 1),
                              n);
            const CoordinatePath path =
                approx_coordinate(ds, cfg.ell, kappa_hat, plan);
            out.results.push_back(
                test_from_values(path.values, regression_beta, cfg.level));
        }
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
        out.results.clear();
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n_cases = cfg.cases.size();
    const std::size_t n_tests = cfg.test_n.size();
    const auto reps = static_cast<std::size_t>(cfg.replications);

    // One slot per (case, replication); workers never share slots, and the
    // reduction below walks slots in index order.
    std::vector<ReplicationOutcome> slots(n_cases * reps);
    parallel_for(0, n_cases * reps,
                 [&](std::size_t w) {
                     const std::size_t c = w / reps;
                     const auto rep = static_cast<std::uint32_t>(w % reps);
                     slots[w] = run_replication(cfg, c, rep);
                 },
                 cfg.threads);

    ExperimentResult res;
    res.total_replications = static_cast<std::int64_t>(n_cases * reps);
    res.table.n_values = cfg.test_n;
    res.table.labels.reserve(n_cases);
    for (const auto& pc : cfg.cases) res.table.labels.push_back(pc.label);
    res.table.cells.assign(n_cases, std::vector<PowerCell>(n_tests));
    res.t_samples.assign(
        n_cases, std::vector<std::vector<double>>(
                     n_tests, std::vector<double>(
                                  reps, std::numeric_limits<double>::quiet_NaN())));

    for (std::size_t c = 0; c < n_cases; ++c) {
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const ReplicationOutcome& o = slots[c * reps + rep];
            if (!o.ok) {
                ++res.failed_replications;
                for (std::size_t t = 0; t < n_tests; ++t)
                    ++res.table.cells[c][t].failures;
                continue;
            }
            for (std::size_t t = 0; t < n_tests; ++t) {
                PowerCell& cell = res.table.cells[c][t];
                ++cell.replications;
                if (o.results[t].reject) ++cell.rejections;
                res.t_samples[c][t][rep] = o.results[t].t_n;
            }
        }
        for (std::size_t t = 0; t < n_tests; ++t) {
            PowerCell& cell = res.table.cells[c][t];
            cell.rate = cell.replications > 0
                            ? static_cast<double>(cell.rejections) /
                                  static_cast<double>(cell.replications)
                            : 0.0;
        }
    }

    res.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (res.failed_replications * 20 > res.total_replications) {
        std::ostringstream os;
        os << "run_experiment: " << res.failed_replications << " of "
           << res.total_replications << " replications failed (> 5%)";
        throw ExperimentError(os.str());
    }
    return res;
}

std::string power_table_csv(const PowerTable& table) {
    std::ostringstream out;
    out.precision(17);
    out << "label,n,replications,failures,rejections,rate\n";
    for (std::size_t c = 0; c < table.labels.size(); ++c)
        for (std::size_t t = 0; t < table.n_values.size(); ++t) {
            const PowerCell& cell = table.cells[c][t];
            out << table.labels[c] << ',' << table.n_values[t] << ','
                << cell.replications << ',' << cell.failures << ','
                << cell.rejections << ',' << cell.rate << '\n';
        }
    return out.str();
}

PowerTable parse_power_table_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) ||
        line != "label,n,replications,failures,rejections,rate")
        throw FormatError("parse_power_table_csv: bad header");
    PowerTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string label, field;
        std::getline(row, label, ',');
        PowerCell cell;
        std::int64_t n = 0;
        std::getline(row, field, ',');
        n = std::stoll(field);
        std::getline(row, field, ',');
        cell.replications = std::stoll(field);
        std::getline(row, field, ',');
        cell.failures = std::stoll(field);
        std::getline(row, field, ',');
        cell.rejections = std::stoll(field);
        std::getline(row, field, ',');
        cell.rate = std::stod(field);

        auto lit = std::find(table.labels.begin(), table.labels.end(), label);
        std::size_t li;
        if (lit == table.labels.end()) {
            li = table.labels.size();
            table.labels.push_back(label);
            table.cells.emplace_back();
        } else {
            li = static_cast<std::size_t>(lit - table.labels.begin());
        }
        auto nit = std::find(table.n_values.begin(), table.n_values.end(), n);
        if (nit == table.n_values.end()) table.n_values.push_back(n);
        table.cells[li].push_back(cell);
    }
    return table;
}

void export_results(const ExperimentConfig& cfg, const ExperimentResult& res,
                    const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream out(fs::path(out_dir) / name, std::ios::trunc);
        if (!out)
            throw FormatError("export_results: cannot open " + name + " in " +
                              out_dir);
        out << body;
        if (!out) throw FormatError("export_results: write failed for " + name);
    };

    write("power.csv", power_table_csv(res.table));

    std::ostringstream samples;
    samples.precision(17);
    samples << "label,n,replication,t_n\n";
    for (std::size_t c = 0; c < res.table.labels.size(); ++c)
        for (std::size_t t = 0; t < res.table.n_values.size(); ++t)
            for (std::size_t rep = 0; rep < res.t_samples[c][t].size(); ++rep) {
                const double v = res.t_samples[c][t][rep];
                if (std::isnan(v)) continue;
                samples << res.table.labels[c] << ',' << res.table.n_values[t]
                        << ',' << rep << ',' << v << '\n';
            }
    write("t_samples.csv", samples.str());

    std::ostringstream ecdf;
    ecdf.precision(17);
    ecdf << "label,n,t_n,ecdf,kolmogorov_cdf\n";
    for (std::size_t c = 0; c < res.table.labels.size(); ++c)
        for (std::size_t t = 0; t < res.table.n_values.size(); ++t) {
            std::vector<double> vals;
            vals.reserve(res.t_samples[c][t].size());
            for (double v : res.t_samples[c][t])
                if (!std::isnan(v)) vals.push_back(v);
            std::sort(vals.begin(), vals.end());
            for (std::size_t i = 0; i < vals.size(); ++i)
                ecdf << res.table.labels[c] << ',' << res.table.n_values[t]
                     << ',' << vals[i] << ','
                     << static_cast<double>(i + 1) / vals.size() << ','
                     << kolmogorov_cdf(vals[i]) << '\n';
        }
    write("ecdf.csv", ecdf.str());

    write("manifest.json", experiment_manifest_json(cfg, res));
}

}  // namespace spdecpt

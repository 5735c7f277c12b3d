// Command-line front end. Talks to the library exclusively through the
// C API in spdecpt/spdecpt.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spdecpt/spdecpt.h"

namespace {

using nlohmann::json;

[[noreturn]] void die(spdecpt_status status) {
    std::cerr << "error (" << status << "): " << spdecpt_last_error() << "\n";
    std::exit(1);
}

void check(spdecpt_status status) {
    if (status != SPDECPT_OK) die(status);
}

std::string take_string(char* owned) {
    std::string out = owned ? owned : "";
    spdecpt_string_free(owned);
    return out;
}

void write_or_print(const std::optional<std::string>& path,
                    const std::string& body) {
    if (!path) {
        std::cout << body;
        if (!body.empty() && body.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(*path, std::ios::trunc);
    if (!out) {
        std::cerr << "error: cannot open " << *path << "\n";
        std::exit(1);
    }
    out << body;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open " << path << "\n";
        std::exit(1);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct DatasetHandle {
    spdecpt_dataset* ds = nullptr;
    ~DatasetHandle() { spdecpt_dataset_free(ds); }
};

// Shared model/grid flags used by `simulate` and `mc`.
struct ModelFlags {
    double theta0 = 0.0;
    std::vector<double> theta1 = {0.2};
    double theta2 = 0.2;
    double alpha = 0.0;
    std::string gamma = "cylindrical";
    double mu0 = 0.0;
    std::vector<double> change_points;
    std::vector<double> levels = {1.0};
    std::int64_t N = 2000;
    std::vector<std::int64_t> M = {500};
    std::vector<std::int64_t> L = {2000};

    void add_to(CLI::App& cmd) {
        cmd.add_option("--theta0", theta0, "Potential coefficient");
        cmd.add_option("--theta1", theta1, "Drift coefficient per axis")
            ->expected(1, 2);
        cmd.add_option("--theta2", theta2, "Diffusivity (positive)");
        cmd.add_option("--alpha", alpha, "Noise damping exponent");
        cmd.add_option("--gamma", gamma,
                       "Spectral weight rule: cylindrical|spectral|polynomial");
        cmd.add_option("--mu0", mu0, "Offset of the polynomial gamma rule");
        cmd.add_option("--cp", change_points,
                       "Volatility change points in (0,1)");
        cmd.add_option("--levels", levels, "Volatility levels (one more than --cp)");
        cmd.add_option("--N", N, "Time steps of the full grid");
        cmd.add_option("--M", M, "Spatial points per axis")->expected(1, 2);
        cmd.add_option("--L", L, "Retained modes per axis")->expected(1, 2);
    }

    json model_json() const {
        return {{"params",
                 {{"theta0", theta0}, {"theta1", theta1}, {"theta2", theta2}}},
                {"noise", {{"alpha", alpha}, {"gamma", gamma}, {"mu0", mu0}}},
                {"grid", {{"N", N}, {"M", M}}},
                {"truncation", L}};
    }
};

// Optimizer flags shared by `estimate`, `test` and `mc`.
struct OptimizerFlags {
    int coarse_grid = 17;
    double refine_tol = 1e-10;
    double x_tol = 1e-9;
    std::int64_t max_evals = 100000;
    std::vector<double> box_flat;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--coarse-grid", coarse_grid, "Grid points per axis");
        cmd.add_option("--refine-tol", refine_tol, "Objective tolerance");
        cmd.add_option("--x-tol", x_tol, "Box-scaled simplex diameter tolerance");
        cmd.add_option("--max-evals", max_evals, "Evaluation budget");
        cmd.add_option("--box", box_flat,
                       "Search box as flat lo hi pairs, one pair per coordinate");
    }

    json to_json() const {
        json opt{{"coarse_grid", coarse_grid},
                 {"refine_tol", refine_tol},
                 {"x_tol", x_tol},
                 {"max_evals", max_evals}};
        if (!box_flat.empty()) {
            json box = json::array();
            for (std::size_t i = 0; i + 1 < box_flat.size(); i += 2)
                box.push_back({box_flat[i], box_flat[i + 1]});
            opt["box"] = box;
        }
        return opt;
    }
};

std::vector<double> parse_path_csv(const std::string& text) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string line;
    int value_col = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream row(line);
        std::string f;
        while (std::getline(row, f, ',')) fields.push_back(f);
        if (value_col < 0) {
            // Header row: find a "value" column; headerless single-column
            // files are taken as the values themselves.
            for (std::size_t i = 0; i < fields.size(); ++i)
                if (fields[i] == "value") value_col = static_cast<int>(i);
            if (value_col >= 0) continue;
            value_col = 0;
        }
        if (static_cast<int>(fields.size()) <= value_col) continue;
        try {
            values.push_back(std::stod(fields[value_col]));
        } catch (...) {
            std::cerr << "error: non-numeric value in path CSV: " << line << "\n";
            std::exit(1);
        }
    }
    return values;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SPDE volatility change-point toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(spdecpt_version()));

    // ---- simulate ----
    auto* sim = app.add_subcommand(
        "simulate", "Simulate a dataset and write it to a file");
    ModelFlags sim_model;
    sim_model.add_to(*sim);
    std::uint64_t sim_seed = 0;
    std::uint32_t sim_rep = 0;
    double sim_x0 = 0.0;
    std::string sim_out;
    std::optional<std::string> sim_csv;
    bool sim_print_meta = false;
    sim->add_option("--seed", sim_seed, "RNG seed")->required();
    sim->add_option("--replication", sim_rep, "Replication stream id");
    sim->add_option("--x0", sim_x0, "Initial coefficient of every mode");
    sim->add_option("--out", sim_out, "Output dataset path")->required();
    sim->add_option("--csv", sim_csv, "Also export the tensor as CSV");
    sim->add_flag("--meta", sim_print_meta, "Print dataset metadata JSON");

    // ---- estimate ----
    auto* est = app.add_subcommand(
        "estimate", "Fit coefficient parameters from a dataset");
    std::string est_in, est_method = "di";
    double est_b = 0.05;
    std::vector<std::int64_t> est_m = {50};
    std::optional<std::string> est_out;
    OptimizerFlags est_opt;
    est->add_option("--in", est_in, "Dataset path")->required();
    est->add_option("--method", est_method, "rv | di | ti");
    est->add_option("--b", est_b, "Interior window offset in (0, 1/2)");
    est->add_option("--m", est_m, "Thinned spatial counts per axis")
        ->expected(1, 2);
    est_opt.add_to(*est);
    est->add_option("--out", est_out, "Write the estimate JSON here");

    // ---- test ----
    auto* tst = app.add_subcommand(
        "test", "Run the volatility change-point test");
    std::optional<std::string> tst_in, tst_path_csv, tst_out, tst_dump;
    std::vector<int> tst_ell;
    std::optional<std::int64_t> tst_n;
    double tst_level = 0.05;
    std::string tst_beta = "total-qv";
    std::vector<double> tst_kappa;
    std::optional<std::string> tst_method;
    double tst_b = 0.05;
    std::vector<std::int64_t> tst_m = {50};
    OptimizerFlags tst_opt;
    tst->add_option("--in", tst_in, "Dataset path");
    tst->add_option("--path-csv", tst_path_csv,
                    "Coordinate path CSV (i,t,value,S or one value per line)");
    tst->add_option("--ell", tst_ell, "Mode index per axis")->expected(1, 2);
    tst->add_option("--n", tst_n, "Thinned time count for the test");
    tst->add_option("--level", tst_level, "Significance level");
    tst->add_option("--beta", tst_beta, "total-qv | regression");
    tst->add_option("--kappa", tst_kappa, "Explicit kappa (skip estimation)")
        ->expected(1, 2);
    tst->add_option("--method", tst_method, "Estimator for kappa: rv | di");
    tst->add_option("--b", tst_b, "Estimation window offset");
    tst->add_option("--m", tst_m, "Estimation thinned counts")->expected(1, 2);
    tst_opt.add_to(*tst);
    tst->add_option("--out", tst_out, "Write the test result JSON here");
    tst->add_option("--dump-path", tst_dump,
                    "Write the reconstructed path CSV here");

    // ---- mc ----
    auto* mc = app.add_subcommand(
        "mc", "Run a Monte Carlo experiment and export its results");
    std::optional<std::string> mc_config;
    std::string mc_out_dir = "mc-out";
    std::uint64_t mc_seed = 0;
    ModelFlags mc_model;
    mc_model.add_to(*mc);
    std::optional<std::string> mc_mode, mc_estimator, mc_beta;
    std::optional<double> mc_level;
    std::optional<std::int64_t> mc_reps;
    std::optional<unsigned> mc_threads;
    std::vector<std::int64_t> mc_test_n;
    std::vector<int> mc_ell;
    std::optional<double> mc_b;
    std::vector<std::int64_t> mc_m;
    std::vector<double> mc_sweep_sigma2, mc_sweep_tau;
    double mc_tau = 0.5, mc_sigma2 = 1.8;
    OptimizerFlags mc_opt;
    mc_opt.add_to(*mc);
    mc->add_option("--config", mc_config, "Experiment config JSON file");
    mc->add_option("--out", mc_out_dir, "Output directory");
    mc->add_option("--seed", mc_seed, "Base RNG seed")->required();
    mc->add_option("--mode", mc_mode, "full | coordinate");
    mc->add_option("--estimator", mc_estimator, "oracle | rv | di | ti");
    mc->add_option("--beta", mc_beta, "total-qv | regression");
    mc->add_option("--level", mc_level, "Significance level");
    mc->add_option("--replications", mc_reps, "Monte Carlo replications");
    mc->add_option("--threads", mc_threads, "Worker threads (0 = hardware)");
    mc->add_option("--test-n", mc_test_n, "Thinned time counts to test");
    mc->add_option("--ell", mc_ell, "Mode index per axis")->expected(1, 2);
    mc->add_option("--est-b", mc_b, "Estimation window offset");
    mc->add_option("--est-m", mc_m, "Estimation thinned counts")->expected(1, 2);
    mc->add_option("--sweep-sigma2", mc_sweep_sigma2,
                   "Post-change levels to sweep (fixed --tau)");
    mc->add_option("--sweep-tau", mc_sweep_tau,
                   "Change points to sweep (fixed --sigma2)");
    mc->add_option("--tau", mc_tau, "Change point for --sweep-sigma2");
    mc->add_option("--sigma2", mc_sigma2, "Post-change level for --sweep-tau");

    // ---- table-kolmogorov ----
    auto* tab = app.add_subcommand(
        "table-kolmogorov", "Print CDF and quantile tables as CSV");
    double tab_from = 0.1, tab_to = 2.5, tab_step = 0.05;
    std::vector<double> tab_quantiles = {0.5, 0.9, 0.95, 0.99};
    std::optional<std::string> tab_out;
    tab->add_option("--from", tab_from, "First CDF abscissa");
    tab->add_option("--to", tab_to, "Last CDF abscissa");
    tab->add_option("--step", tab_step, "Abscissa step");
    tab->add_option("--quantiles", tab_quantiles, "Probabilities to invert");
    tab->add_option("--out", tab_out, "Write the CSV here");

    CLI11_PARSE(app, argc, argv);

    if (*sim) {
        json cfg = sim_model.model_json();
        cfg["profile"] = {{"change_points", sim_model.change_points},
                          {"levels", sim_model.levels}};
        cfg["seed"] = sim_seed;
        cfg["replication"] = sim_rep;
        cfg["initial_coefficient"] = sim_x0;
        DatasetHandle h;
        check(spdecpt_simulate(cfg.dump().c_str(), &h.ds));
        check(spdecpt_dataset_save(h.ds, sim_out.c_str()));
        if (sim_csv) check(spdecpt_dataset_export_csv(h.ds, sim_csv->c_str()));
        if (sim_print_meta) {
            char* meta = nullptr;
            check(spdecpt_dataset_meta(h.ds, &meta));
            std::cout << take_string(meta) << "\n";
        }
        return 0;
    }

    if (*est) {
        DatasetHandle h;
        check(spdecpt_dataset_load(est_in.c_str(), &h.ds));
        json opts{{"method", est_method},
                  {"b", est_b},
                  {"m", est_m},
                  {"optimizer", est_opt.to_json()}};
        char* out = nullptr;
        check(spdecpt_estimate(h.ds, opts.dump().c_str(), &out));
        write_or_print(est_out, take_string(out));
        return 0;
    }

    if (*tst) {
        if (tst_in && tst_path_csv) {
            std::cerr << "error: pass either --in or --path-csv, not both\n";
            return 1;
        }
        if (tst_path_csv) {
            const std::vector<double> values =
                parse_path_csv(read_file(*tst_path_csv));
            json opts{{"level", tst_level}};
            char* out = nullptr;
            check(spdecpt_test_path_values(values.data(), values.size(),
                                           opts.dump().c_str(), &out));
            write_or_print(tst_out, take_string(out));
            return 0;
        }
        if (!tst_in) {
            std::cerr << "error: test needs --in or --path-csv\n";
            return 1;
        }
        DatasetHandle h;
        check(spdecpt_dataset_load(tst_in->c_str(), &h.ds));
        json opts{{"level", tst_level}, {"beta", tst_beta}};
        if (!tst_ell.empty()) opts["ell"] = tst_ell;
        if (tst_n) opts["n"] = *tst_n;
        if (!tst_kappa.empty()) opts["kappa"] = tst_kappa;
        if (tst_method) {
            opts["method"] = *tst_method;
            opts["b"] = tst_b;
            opts["m"] = tst_m;
            opts["optimizer"] = tst_opt.to_json();
        }
        char* out = nullptr;
        check(spdecpt_test_dataset(h.ds, opts.dump().c_str(), &out));
        write_or_print(tst_out, take_string(out));
        if (tst_dump) {
            char* csv = nullptr;
            check(spdecpt_coordinate_path(h.ds, opts.dump().c_str(), &csv));
            write_or_print(tst_dump, take_string(csv));
        }
        return 0;
    }

    if (*mc) {
        json cfg;
        if (mc_config) cfg = json::parse(read_file(*mc_config));
        // Flag overrides on top of the file (or a config built from flags).
        const json base = mc_model.model_json();
        for (const auto& item : base.items())
            if (!cfg.contains(item.key())) cfg[item.key()] = item.value();
        if (mc->count("--theta0") || mc->count("--theta1") ||
            mc->count("--theta2"))
            cfg["params"] = base.at("params");
        if (mc->count("--alpha") || mc->count("--gamma") || mc->count("--mu0"))
            cfg["noise"] = base.at("noise");
        if (mc->count("--M") || mc->count("--N")) cfg["grid"] = base.at("grid");
        if (mc->count("--L")) cfg["truncation"] = base.at("truncation");

        if (!mc_sweep_sigma2.empty()) {
            json profiles = json::array();
            for (double s2 : mc_sweep_sigma2)
                profiles.push_back({{"label", "sigma2=" + std::to_string(s2)},
                                    {"change_points", {mc_tau}},
                                    {"levels", {1.0, s2}}});
            cfg["profiles"] = profiles;
        } else if (!mc_sweep_tau.empty()) {
            json profiles = json::array();
            for (double tau : mc_sweep_tau)
                profiles.push_back({{"label", "tau=" + std::to_string(tau)},
                                    {"change_points", {tau}},
                                    {"levels", {1.0, mc_sigma2}}});
            cfg["profiles"] = profiles;
        } else if (mc->count("--cp") || mc->count("--levels") ||
                   (!cfg.contains("profiles") && !cfg.contains("profile"))) {
            cfg["profile"] = {{"change_points", mc_model.change_points},
                              {"levels", mc_model.levels}};
            cfg.erase("profiles");
        }

        if (mc_mode) cfg["mode"] = *mc_mode;
        if (mc_estimator) cfg["estimator"] = *mc_estimator;
        if (mc_beta) cfg["beta"] = *mc_beta;
        if (mc_level) cfg["level"] = *mc_level;
        if (mc_reps) cfg["replications"] = *mc_reps;
        if (mc_threads) cfg["threads"] = *mc_threads;
        if (!mc_test_n.empty()) cfg["test_n"] = mc_test_n;
        if (!cfg.contains("test_n")) cfg["test_n"] = {100, 400};
        if (!mc_ell.empty()) cfg["ell"] = mc_ell;
        if (mc_b || !mc_m.empty()) {
            json plan = cfg.value("estimation_plan", json::object());
            if (mc_b) plan["b"] = *mc_b;
            if (!mc_m.empty()) plan["m"] = mc_m;
            cfg["estimation_plan"] = plan;
        }
        if (mc->count("--coarse-grid") || mc->count("--refine-tol") ||
            mc->count("--x-tol") || mc->count("--max-evals") ||
            mc->count("--box") || !cfg.contains("optimizer"))
            cfg["optimizer"] = mc_opt.to_json();
        cfg["seed"] = mc_seed;

        char* summary = nullptr;
        check(spdecpt_mc_run(cfg.dump().c_str(), mc_out_dir.c_str(), &summary));
        std::cout << take_string(summary) << "\n";
        return 0;
    }

    if (*tab) {
        std::ostringstream out;
        out.precision(12);
        out << "x,cdf\n";
        for (double x = tab_from; x <= tab_to + 1e-12; x += tab_step) {
            double v = 0.0;
            check(spdecpt_kolmogorov_cdf(x, &v));
            out << x << ',' << v << '\n';
        }
        out << "\np,quantile\n";
        for (double p : tab_quantiles) {
            double q = 0.0;
            check(spdecpt_kolmogorov_quantile(p, &q));
            out << p << ',' << q << '\n';
        }
        write_or_print(tab_out, out.str());
        return 0;
    }

    return 0;
}

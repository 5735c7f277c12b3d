#include "spdecpt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spdecpt/common.hpp"

namespace spdecpt {
namespace {

// The simplex runs in box-scaled coordinates ([0,1] per axis) so tolerances
// mean the same thing on every problem.
struct Scaler {
    const std::vector<std::array<double, 2>>& box;
    std::vector<double> to_user(const std::vector<double>& u) const {
        std::vector<double> x(u.size());
        for (std::size_t k = 0; k < u.size(); ++k)
            x[k] = box[k][0] + u[k] * (box[k][1] - box[k][0]);
        return x;
    }
};

void clip_unit(std::vector<double>& u) {
    for (double& v : u) v = std::clamp(v, 0.0, 1.0);
}

}  // namespace

void OptimizerConfig::validate() const {
    if (box.empty()) throw ConfigError("OptimizerConfig: box is empty");
    for (const auto& b : box) {
        if (!std::isfinite(b[0]) || !std::isfinite(b[1]) || !(b[0] < b[1]))
            throw ConfigError("OptimizerConfig: box bounds must be finite with lo < hi");
    }
    if (coarse_grid < 2)
        throw ConfigError("OptimizerConfig: coarse_grid must be >= 2");
    if (!(refine_tol > 0.0) || !(x_tol > 0.0))
        throw ConfigError("OptimizerConfig: tolerances must be positive");
    if (max_evals < 1) throw ConfigError("OptimizerConfig: max_evals must be >= 1");
}

MinimizeResult minimize_box(
    const std::function<double(const std::vector<double>&)>& objective,
    const OptimizerConfig& cfg) {
    cfg.validate();
    const std::size_t dim = cfg.box.size();
    const Scaler scaler{cfg.box};

    std::int64_t evals = 0;
    std::vector<double> best_u(dim, 0.5);
    double best_f = std::numeric_limits<double>::infinity();
    const auto eval = [&](const std::vector<double>& u) {
        ++evals;
        const double f = objective(scaler.to_user(u));
        if (f < best_f) {
            best_f = f;
            best_u = u;
        }
        return f;
    };
    const auto budget_guard = [&]() {
        if (evals >= cfg.max_evals)
            throw ConvergenceError("minimize_box: evaluation budget exhausted",
                                   scaler.to_user(best_u), best_f);
    };

    // Stage 1: full grid scan, first-best wins on ties.
    std::vector<std::size_t> digit(dim, 0);
    const std::size_t g = static_cast<std::size_t>(cfg.coarse_grid);
    for (;;) {
        budget_guard();
        std::vector<double> u(dim);
        for (std::size_t k = 0; k < dim; ++k)
            u[k] = static_cast<double>(digit[k]) / (g - 1);
        eval(u);
        std::size_t k = 0;
        while (k < dim && ++digit[k] == g) digit[k++] = 0;
        if (k == dim) break;
    }

    // Stage 2: Nelder-Mead from the best grid point.
    const double step = 0.5 / (g - 1);
    std::vector<std::vector<double>> simplex(dim + 1, best_u);
    std::vector<double> fv(dim + 1);
    for (std::size_t k = 0; k < dim; ++k) {
        auto& v = simplex[k + 1];
        v[k] += (v[k] + step <= 1.0) ? step : -step;
        clip_unit(v);
    }
    for (std::size_t i = 0; i <= dim; ++i) {
        budget_guard();
        fv[i] = eval(simplex[i]);
    }

    std::vector<std::size_t> order(dim + 1);
    const auto sort_simplex = [&] {
        for (std::size_t i = 0; i <= dim; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    };
    const auto centroid_excluding = [&](std::size_t worst) {
        std::vector<double> c(dim, 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < dim; ++k) c[k] += simplex[i][k];
        }
        for (double& v : c) v /= static_cast<double>(dim);
        return c;
    };
    const auto blend = [&](const std::vector<double>& c,
                           const std::vector<double>& x, double coeff) {
        std::vector<double> out(dim);
        for (std::size_t k = 0; k < dim; ++k)
            out[k] = c[k] + coeff * (c[k] - x[k]);
        clip_unit(out);
        return out;
    };

    for (;;) {
        sort_simplex();
        const std::size_t lo = order[0], hi = order[dim];
        double diam = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            double mn = simplex[0][k], mx = simplex[0][k];
            for (std::size_t i = 1; i <= dim; ++i) {
                mn = std::min(mn, simplex[i][k]);
                mx = std::max(mx, simplex[i][k]);
            }
            diam = std::max(diam, mx - mn);
        }
        const double spread = fv[hi] - fv[lo];
        if (diam <= cfg.x_tol && spread <= cfg.refine_tol * (1.0 + std::abs(fv[lo])))
            break;

        budget_guard();
        const auto c = centroid_excluding(hi);
        const auto reflected = blend(c, simplex[hi], 1.0);
        const double f_r = eval(reflected);
        if (f_r < fv[order[0]]) {
            budget_guard();
            const auto expanded = blend(c, simplex[hi], 2.0);
            const double f_e = eval(expanded);
            if (f_e < f_r) {
                simplex[hi] = expanded;
                fv[hi] = f_e;
            } else {
                simplex[hi] = reflected;
                fv[hi] = f_r;
            }
        } else if (f_r < fv[order[dim - 1]]) {
            simplex[hi] = reflected;
            fv[hi] = f_r;
        } else {
            budget_guard();
            const auto contracted = blend(c, simplex[hi], f_r < fv[hi] ? 0.5 : -0.5);
            const double f_c = eval(contracted);
            if (f_c < std::min(f_r, fv[hi])) {
                simplex[hi] = contracted;
                fv[hi] = f_c;
            } else {
                // Shrink toward the current best vertex.
                for (std::size_t i = 0; i <= dim; ++i) {
                    if (i == lo) continue;
                    for (std::size_t k = 0; k < dim; ++k)
                        simplex[i][k] =
                            simplex[lo][k] + 0.5 * (simplex[i][k] - simplex[lo][k]);
                    clip_unit(simplex[i]);
                    budget_guard();
                    fv[i] = eval(simplex[i]);
                }
            }
        }
    }

    return {scaler.to_user(best_u), best_f, evals};
}

}  // namespace spdecpt

#include "spdecpt/estimation.hpp"

#include <cmath>
#include <cstring>
#include <unordered_map>

#include "spdecpt/common.hpp"
#include "spdecpt/special_functions.hpp"

namespace spdecpt {
namespace {

void require_dim(const FieldDataset& ds, int d, const char* who) {
    if (ds.dimension() != d)
        throw ConfigError(std::string(who) + ": dataset dimension must be " +
                          std::to_string(d));
}

// Column of field values over the full time axis at one spatial node (d=1).
inline double column_value_1d(const FieldDataset& ds, std::int64_t i,
                              std::int64_t node) {
    return ds.values[i * (ds.grid.M[0] + 1) + node];
}

struct PsiPairCache {
    double r;
    double alpha;
    mutable std::unordered_map<std::uint64_t, std::array<double, 2>> cache;

    std::array<double, 2> operator()(double theta2) const {
        std::uint64_t key;
        static_assert(sizeof(key) == sizeof(theta2));
        std::memcpy(&key, &theta2, sizeof(key));
        if (auto it = cache.find(key); it != cache.end()) return it->second;
        const std::array<double, 2> val{
            psi_r_alpha(theta2, r, alpha),
            psi_r_alpha(theta2, r / std::sqrt(2.0), alpha)};
        cache.emplace(key, val);
        return val;
    }
};

}  // namespace

double theta2_lower_bound(double r) {
    return -r * r / (8.0 * std::log(std::sqrt(2.0) - 1.0));
}

OptimizerConfig with_default_box_rv(OptimizerConfig cfg) {
    if (cfg.box.empty())
        cfg.box = {{-10.0, 10.0}, {1e-4, 1e2}};
    if (cfg.box.size() != 2)
        throw ConfigError("realized-variance fit needs a 2-coordinate box");
    return cfg;
}

OptimizerConfig with_default_box_di(OptimizerConfig cfg, double r) {
    if (cfg.box.empty())
        cfg.box = {{-10.0, 10.0},
                   {std::max(1e-3, theta2_lower_bound(r) + 1e-6), 10.0},
                   {1e-4, 1e2}};
    if (cfg.box.size() != 3)
        throw ConfigError("double-increment fit needs a 3-coordinate box");
    return cfg;
}

OptimizerConfig with_default_box_ti(OptimizerConfig cfg, double r) {
    if (cfg.box.empty())
        cfg.box = {{-10.0, 10.0},
                   {-10.0, 10.0},
                   {std::max(1e-3, theta2_lower_bound(r) + 1e-6), 10.0},
                   {1e-4, 1e2}};
    if (cfg.box.size() != 4)
        throw ConfigError("triple-increment fit needs a 4-coordinate box");
    return cfg;
}

double z_statistic(const FieldDataset& ds, const ThinnedIndexMaps& maps,
                   std::int64_t j) {
    require_dim(ds, 1, "z_statistic");
    const auto& idx = maps.space_indices[0];
    if (j < 0 || j >= static_cast<std::int64_t>(idx.size()))
        throw ConfigError("z_statistic: thinned index out of range");
    const std::int64_t N = ds.grid.N;
    const std::int64_t node = idx[j];
    double sum = 0.0;
    double prev = column_value_1d(ds, 0, node);
    for (std::int64_t i = 1; i <= N; ++i) {
        const double cur = column_value_1d(ds, i, node);
        const double inc = cur - prev;
        sum += inc * inc;
        prev = cur;
    }
    return sum / (N * std::sqrt(1.0 / N));
}

std::vector<double> z_statistics(const FieldDataset& ds,
                                 const ThinnedIndexMaps& maps) {
    const auto count =
        static_cast<std::int64_t>(maps.space_indices[0].size());
    std::vector<double> z(count);
    for (std::int64_t j = 0; j < count; ++j) z[j] = z_statistic(ds, maps, j);
    return z;
}

RealizedVarianceEstimate fit_realized_variance_curve(
    const std::vector<double>& z, const std::vector<double>& y,
    OptimizerConfig cfg) {
    if (z.size() != y.size() || z.empty())
        throw ConfigError("fit_realized_variance: statistic/location size mismatch");
    cfg = with_default_box_rv(std::move(cfg));
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    const auto objective = [&](const std::vector<double>& p) {
        const double kappa = p[0], v0 = p[1];
        double acc = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            const double res = z[j] - v0 * inv_sqrt_pi * std::exp(-kappa * y[j]);
            acc += res * res;
        }
        return acc / static_cast<double>(z.size());
    };
    const MinimizeResult m = minimize_box(objective, cfg);
    return {m.point[0], m.point[1], m.value, m.evals};
}

RealizedVarianceEstimate fit_realized_variance(const FieldDataset& ds,
                                               const ThinningPlan& plan,
                                               OptimizerConfig cfg) {
    require_dim(ds, 1, "fit_realized_variance");
    const ThinnedIndexMaps maps = thinned_grid(ds.grid, plan);
    const std::int64_t m = plan.m[0];
    std::vector<double> z(m), y(m);
    for (std::int64_t j = 1; j <= m; ++j) {
        z[j - 1] = z_statistic(ds, maps, j);
        y[j - 1] = maps.space_coord(ds.grid, 0, j);
    }
    return fit_realized_variance_curve(z, y, std::move(cfg));
}

DoubleIncrement double_increment(const FieldDataset& ds,
                                 const ThinnedIndexMaps& maps, std::int64_t i,
                                 std::int64_t j) {
    require_dim(ds, 1, "double_increment");
    const auto& idx = maps.space_indices[0];
    const std::int64_t N = ds.grid.N;
    if (j < 1 || j >= static_cast<std::int64_t>(idx.size()))
        throw ConfigError("double_increment: spatial index out of range");
    if (i < 1 || i > N)
        throw ConfigError("double_increment: time index out of range");
    const auto d_at = [&](std::int64_t ii) {
        return (column_value_1d(ds, ii, idx[j]) -
                column_value_1d(ds, ii - 1, idx[j])) -
               (column_value_1d(ds, ii, idx[j - 1]) -
                column_value_1d(ds, ii - 1, idx[j - 1]));
    };
    DoubleIncrement out{d_at(i), std::nullopt};
    if (i < N) out.d_tilde = out.d + d_at(i + 1);
    return out;
}

DoubleIncrementStats double_increment_stats(const FieldDataset& ds,
                                            const ThinningPlan& plan) {
    require_dim(ds, 1, "double_increment_stats");
    const ThinnedIndexMaps maps = thinned_grid(ds.grid, plan);
    const auto& idx = maps.space_indices[0];
    const std::int64_t m = plan.m[0];
    const std::int64_t N = ds.grid.N;
    const double sqrt_step = std::sqrt(1.0 / static_cast<double>(N));

    DoubleIncrementStats stats;
    stats.stat.resize(m);
    stats.stat_tilde.resize(m);
    stats.y_mid.resize(m);
    stats.r = plan.nominal_spacing(0) / sqrt_step;
    for (std::int64_t j = 1; j <= m; ++j) {
        double sum = 0.0, sum_tilde = 0.0, prev_d = 0.0;
        double left_prev = column_value_1d(ds, 0, idx[j - 1]);
        double right_prev = column_value_1d(ds, 0, idx[j]);
        for (std::int64_t i = 1; i <= N; ++i) {
            const double left = column_value_1d(ds, i, idx[j - 1]);
            const double right = column_value_1d(ds, i, idx[j]);
            const double d = (right - right_prev) - (left - left_prev);
            sum += d * d;
            if (i > 1) {
                const double t = prev_d + d;
                sum_tilde += t * t;
            }
            prev_d = d;
            left_prev = left;
            right_prev = right;
        }
        stats.stat[j - 1] = sum / (N * sqrt_step);
        stats.stat_tilde[j - 1] = sum_tilde / (N * std::sqrt(2.0) * sqrt_step);
        stats.y_mid[j - 1] = 0.5 * (maps.space_coord(ds.grid, 0, j - 1) +
                                    maps.space_coord(ds.grid, 0, j));
    }
    return stats;
}

DoubleIncrementEstimate fit_double_increment_curve(
    const DoubleIncrementStats& stats, OptimizerConfig cfg) {
    const std::size_t m = stats.stat.size();
    if (m == 0 || stats.stat_tilde.size() != m || stats.y_mid.size() != m)
        throw ConfigError("fit_double_increment: inconsistent statistics");
    if (!(stats.r > 0.0) || !std::isfinite(stats.r))
        throw ConfigError("fit_double_increment: spacing ratio r must be positive");
    cfg = with_default_box_di(std::move(cfg), stats.r);
    const double r = stats.r;
    const auto objective = [&](const std::vector<double>& p) {
        const double kappa = p[0], theta2 = p[1], v = p[2];
        const double psi = psi_r(theta2, r);
        const double psi_half = psi_r(theta2, r / std::sqrt(2.0));
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double curve = v * std::exp(-kappa * stats.y_mid[j]);
            const double res1 = stats.stat[j] - curve * psi;
            const double res2 = stats.stat_tilde[j] - curve * psi_half;
            acc += res1 * res1 + res2 * res2;
        }
        return acc / static_cast<double>(m);
    };
    const MinimizeResult out = minimize_box(objective, cfg);
    return {out.point[0], out.point[1], out.point[2], out.value, out.evals};
}

DoubleIncrementEstimate fit_double_increment(const FieldDataset& ds,
                                             const ThinningPlan& plan,
                                             OptimizerConfig cfg) {
    return fit_double_increment_curve(double_increment_stats(ds, plan),
                                      std::move(cfg));
}

TripleIncrement triple_increment(const FieldDataset& ds,
                                 const ThinnedIndexMaps& maps, std::int64_t i,
                                 std::int64_t j, std::int64_t k) {
    require_dim(ds, 2, "triple_increment");
    const auto& idx1 = maps.space_indices[0];
    const auto& idx2 = maps.space_indices[1];
    const std::int64_t N = ds.grid.N;
    if (j < 1 || j >= static_cast<std::int64_t>(idx1.size()) || k < 1 ||
        k >= static_cast<std::int64_t>(idx2.size()))
        throw ConfigError("triple_increment: spatial index out of range");
    if (i < 1 || i > N)
        throw ConfigError("triple_increment: time index out of range");
    const auto t_at = [&](std::int64_t ii) {
        const auto corner = [&](std::int64_t a, std::int64_t b) {
            return ds.at2(ii, idx1[a], idx2[b]) - ds.at2(ii - 1, idx1[a], idx2[b]);
        };
        return corner(j, k) - corner(j - 1, k) - corner(j, k - 1) +
               corner(j - 1, k - 1);
    };
    TripleIncrement out{t_at(i), std::nullopt};
    if (i < N) out.t_tilde = out.t + t_at(i + 1);
    return out;
}

double TripleIncrementStats::mean_sq() const {
    double total = 0.0;
    for (double s : sum_sq) total += s;
    return total / (static_cast<double>(m1) * m2 * time_steps);
}

TripleIncrementStats triple_increment_stats(const FieldDataset& ds,
                                            const ThinningPlan& plan,
                                            std::int64_t time_stride) {
    require_dim(ds, 2, "triple_increment_stats");
    if (time_stride < 1 || ds.grid.N % time_stride != 0)
        throw ConfigError("triple_increment_stats: stride must divide N");
    const ThinnedIndexMaps maps = thinned_grid(ds.grid, plan);
    const auto& idx1 = maps.space_indices[0];
    const auto& idx2 = maps.space_indices[1];
    const std::int64_t m1 = plan.m[0], m2 = plan.m[1];
    const std::int64_t N = ds.grid.N / time_stride;

    TripleIncrementStats stats;
    stats.m1 = m1;
    stats.m2 = m2;
    stats.time_steps = N;
    stats.time_step = static_cast<double>(time_stride) / ds.grid.N;
    stats.sum_sq.assign(m1 * m2, 0.0);
    stats.sum_sq_tilde.assign(m1 * m2, 0.0);
    stats.r = plan.nominal_spacing(0) / std::sqrt(stats.time_step);
    const double r2 = plan.nominal_spacing(1) / std::sqrt(stats.time_step);
    if (std::abs(stats.r - r2) > 1e-12 * std::abs(stats.r))
        throw ConfigError(
            "triple_increment_stats: the two axes imply different spacing "
            "ratios r; the contrast requires one constant r");

    stats.y_mid_1.resize(m1);
    stats.y_mid_2.resize(m2);
    for (std::int64_t j = 1; j <= m1; ++j)
        stats.y_mid_1[j - 1] = 0.5 * (maps.space_coord(ds.grid, 0, j - 1) +
                                      maps.space_coord(ds.grid, 0, j));
    for (std::int64_t k = 1; k <= m2; ++k)
        stats.y_mid_2[k - 1] = 0.5 * (maps.space_coord(ds.grid, 1, k - 1) +
                                      maps.space_coord(ds.grid, 1, k));

    // Corner time-increments for the whole (m1+1) x (m2+1) stencil, then the
    // rectangle combination per cell.
    const std::int64_t c2 = m2 + 1;
    std::vector<double> inc((m1 + 1) * c2);
    std::vector<double> prev_t(m1 * m2, 0.0);
    std::vector<double> corner_prev((m1 + 1) * c2);
    for (std::int64_t a = 0; a <= m1; ++a)
        for (std::int64_t b = 0; b <= m2; ++b)
            corner_prev[a * c2 + b] = ds.at2(0, idx1[a], idx2[b]);
    for (std::int64_t i = 1; i <= N; ++i) {
        for (std::int64_t a = 0; a <= m1; ++a)
            for (std::int64_t b = 0; b <= m2; ++b) {
                const double cur = ds.at2(i * time_stride, idx1[a], idx2[b]);
                inc[a * c2 + b] = cur - corner_prev[a * c2 + b];
                corner_prev[a * c2 + b] = cur;
            }
        for (std::int64_t j = 1; j <= m1; ++j)
            for (std::int64_t k = 1; k <= m2; ++k) {
                const double t = inc[j * c2 + k] - inc[(j - 1) * c2 + k] -
                                 inc[j * c2 + (k - 1)] +
                                 inc[(j - 1) * c2 + (k - 1)];
                const std::int64_t cell = (j - 1) * m2 + (k - 1);
                stats.sum_sq[cell] += t * t;
                if (i > 1) {
                    const double tt = prev_t[cell] + t;
                    stats.sum_sq_tilde[cell] += tt * tt;
                }
                prev_t[cell] = t;
            }
    }
    return stats;
}

double damping_from_energy_ratio(double coarse_mean_sq, double fine_mean_sq) {
    if (!(coarse_mean_sq > 0.0) || !(fine_mean_sq > 0.0))
        throw ConfigError("estimate_damping: increment energies must be positive");
    return std::log(coarse_mean_sq / fine_mean_sq) / std::log(4.0);
}

double estimate_damping(const FieldDataset& ds, const ThinningPlan& plan) {
    require_dim(ds, 2, "estimate_damping");
    if (plan.m[0] % 2 != 0 || plan.m[1] % 2 != 0)
        throw ConfigError("estimate_damping: per-axis m must be even");
    if (ds.grid.N % 4 != 0)
        throw ConfigError("estimate_damping: N must be divisible by 4");
    const TripleIncrementStats fine = triple_increment_stats(ds, plan, 1);
    const ThinningPlan coarse_plan(plan.b, {plan.m[0] / 2, plan.m[1] / 2});
    const TripleIncrementStats coarse =
        triple_increment_stats(ds, coarse_plan, 4);
    return damping_from_energy_ratio(coarse.mean_sq(), fine.mean_sq());
}

TripleIncrementEstimate fit_triple_increment_surface(
    const TripleIncrementStats& stats, double alpha_hat, GammaRule rule,
    OptimizerConfig cfg) {
    if (!(alpha_hat > 0.0 && alpha_hat < 2.0))
        throw ConfigError("fit_triple_increment: alpha_hat must lie in (0,2)");
    if (rule == GammaRule::Cylindrical)
        throw ConfigError("fit_triple_increment: cylindrical noise has no c_gamma");
    cfg = with_default_box_ti(std::move(cfg), stats.r);

    const std::int64_t m1 = stats.m1, m2 = stats.m2;
    const double n_steps = static_cast<double>(stats.time_steps);
    const double scale1 =
        1.0 / (n_steps * std::pow(stats.time_step, alpha_hat));
    const double scale2 =
        1.0 / (n_steps * std::pow(2.0 * stats.time_step, alpha_hat));

    const PsiPairCache psi_pair{stats.r, alpha_hat, {}};
    std::vector<double> e1(m1), e2(m2);
    const auto objective = [&, e1, e2](const std::vector<double>& p) mutable {
        const double kappa1 = p[0], kappa2 = p[1], theta2 = p[2], v = p[3];
        const auto psi = psi_pair(theta2);
        const double cg = rule == GammaRule::Spectral ? theta2 : 1.0;
        const double cg_alpha = std::pow(cg, alpha_hat);
        for (std::int64_t j = 0; j < m1; ++j)
            e1[j] = std::exp(-kappa1 * stats.y_mid_1[j]);
        for (std::int64_t k = 0; k < m2; ++k)
            e2[k] = std::exp(-kappa2 * stats.y_mid_2[k]);
        double acc = 0.0;
        for (std::int64_t j = 0; j < m1; ++j)
            for (std::int64_t k = 0; k < m2; ++k) {
                const std::int64_t cell = j * m2 + k;
                const double curve = v * e1[j] * e2[k] * cg_alpha;
                const double res1 =
                    scale1 * stats.sum_sq[cell] - curve * psi[0];
                const double res2 =
                    scale2 * stats.sum_sq_tilde[cell] - curve * psi[1];
                acc += res1 * res1 + res2 * res2;
            }
        return acc / static_cast<double>(m1 * m2);
    };
    const MinimizeResult out = minimize_box(objective, cfg);
    return {alpha_hat,
            {out.point[0], out.point[1]},
            out.point[2],
            out.point[3],
            out.value,
            out.evals};
}

TripleIncrementEstimate fit_triple_increment(const FieldDataset& ds,
                                             const ThinningPlan& plan,
                                             double alpha_hat,
                                             OptimizerConfig cfg) {
    return fit_triple_increment_surface(triple_increment_stats(ds, plan, 1),
                                        alpha_hat, ds.noise.rule(),
                                        std::move(cfg));
}

}  // namespace spdecpt

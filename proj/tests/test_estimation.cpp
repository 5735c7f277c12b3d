#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "spdecpt/common.hpp"
#include "spdecpt/estimation.hpp"
#include "spdecpt/special_functions.hpp"

using namespace spdecpt;

namespace {

FieldDataset make_dataset_1d(std::int64_t N, std::int64_t M,
                             const std::function<double(std::int64_t, double)>& f) {
    FieldDataset ds{SpaceTimeGrid(N, {M}),
                    {},
                    OperatorParams(0.0, {0.2}, 0.2),
                    NoiseSpec::cylindrical(),
                    VolatilityProfile::constant(1.0),
                    {1},
                    {0, 0},
                    0.0};
    ds.values.resize((N + 1) * (M + 1));
    for (std::int64_t i = 0; i <= N; ++i)
        for (std::int64_t j = 0; j <= M; ++j)
            ds.values[i * (M + 1) + j] = f(i, static_cast<double>(j) / M);
    return ds;
}

FieldDataset make_dataset_2d(
    std::int64_t N, std::int64_t M1, std::int64_t M2,
    const std::function<double(std::int64_t, double, double)>& f) {
    FieldDataset ds{SpaceTimeGrid(N, {M1, M2}),
                    {},
                    OperatorParams(0.0, {0.2, 0.2}, 0.2),
                    NoiseSpec(0.5, GammaRule::Polynomial, 0.0),
                    VolatilityProfile::constant(1.0),
                    {1, 1},
                    {0, 0},
                    0.0};
    ds.values.resize((N + 1) * (M1 + 1) * (M2 + 1));
    for (std::int64_t i = 0; i <= N; ++i)
        for (std::int64_t j = 0; j <= M1; ++j)
            for (std::int64_t k = 0; k <= M2; ++k)
                ds.values[(i * (M1 + 1) + j) * (M2 + 1) + k] =
                    f(i, static_cast<double>(j) / M1,
                      static_cast<double>(k) / M2);
    return ds;
}

}  // namespace

TEST_CASE("z statistic") {
    SUBCASE("zero field") {
        const auto ds = make_dataset_1d(50, 100, [](std::int64_t, double) {
            return 0.0;
        });
        const auto maps = thinned_grid(ds.grid, ThinningPlan(0.1, {10}));
        for (std::int64_t j = 0; j <= 10; ++j)
            CHECK(z_statistic(ds, maps, j) == 0.0);
    }
    SUBCASE("single-mode field factorizes") {
        const std::int64_t N = 64;
        std::vector<double> w(N + 1);
        for (std::int64_t i = 0; i <= N; ++i)
            w[i] = std::sin(0.37 * i) + 0.1 * i;
        const auto ds = make_dataset_1d(N, 100, [&](std::int64_t i, double y) {
            return eigenfunction_1d(1, y, 1.0) * w[i];
        });
        const auto maps = thinned_grid(ds.grid, ThinningPlan(0.1, {10}));
        double path_energy = 0.0;
        for (std::int64_t i = 1; i <= N; ++i) {
            const double inc = w[i] - w[i - 1];
            path_energy += inc * inc;
        }
        path_energy /= N * std::sqrt(1.0 / N);
        for (std::int64_t j = 0; j <= 10; ++j) {
            const double y = maps.space_coord(ds.grid, 0, j);
            const double e = eigenfunction_1d(1, y, 1.0);
            CHECK(z_statistic(ds, maps, j) ==
                  doctest::Approx(e * e * path_energy).epsilon(1e-12));
        }
    }
    SUBCASE("index bounds") {
        const auto ds = make_dataset_1d(10, 100, [](std::int64_t, double) {
            return 0.0;
        });
        const auto maps = thinned_grid(ds.grid, ThinningPlan(0.1, {10}));
        CHECK_THROWS_AS(z_statistic(ds, maps, 11), ConfigError);
    }
}

TEST_CASE("realized-variance statistics track the model curve in the mean") {
    // Monte Carlo check of E[Z_j] = V0 e^{-kappa y} / sqrt(pi) + O(Delta).
    const std::int64_t N = 1000, M = 200, L = 800;
    SimulationConfig cfg{OperatorParams(0.0, {0.2}, 0.2),
                         NoiseSpec::cylindrical(),
                         VolatilityProfile::constant(1.0),
                         SpaceTimeGrid(N, {M}),
                         {L},
                         {808, 0},
                         0.0};
    const ThinningPlan plan(0.1, {10});
    const int reps = 60;
    std::vector<double> mean(11, 0.0);
    for (int r = 0; r < reps; ++r) {
        cfg.seed.replication = static_cast<std::uint32_t>(r);
        const FieldDataset ds = simulate_field(cfg, 1);
        const auto maps = thinned_grid(ds.grid, plan);
        for (std::int64_t j = 0; j <= 10; ++j)
            mean[j] += z_statistic(ds, maps, j) / reps;
    }
    const double v0 = 1.0 / std::sqrt(0.2);
    const auto maps = thinned_grid(cfg.grid, plan);
    for (std::int64_t j = 0; j <= 10; ++j) {
        const double y = maps.space_coord(cfg.grid, 0, j);
        const double curve = v0 * std::exp(-1.0 * y) / std::sqrt(M_PI);
        CHECK(mean[j] == doctest::Approx(curve).epsilon(0.05));
    }
}

TEST_CASE("field scaling moves Z by c^2 and V0-hat by c^2, kappa unchanged") {
    const std::int64_t N = 400, M = 200;
    SimulationConfig cfg{OperatorParams(0.0, {0.2}, 0.2),
                         NoiseSpec::cylindrical(),
                         VolatilityProfile::constant(1.0),
                         SpaceTimeGrid(N, {M}),
                         {200},
                         {19, 0},
                         0.0};
    FieldDataset ds = simulate_field(cfg, 1);
    const ThinningPlan plan(0.1, {10});
    const auto maps = thinned_grid(ds.grid, plan);
    const double z_before = z_statistic(ds, maps, 4);
    const auto fit_before = fit_realized_variance(ds, plan);

    const double c = 1.7;
    for (double& v : ds.values) v *= c;
    CHECK(z_statistic(ds, maps, 4) ==
          doctest::Approx(c * c * z_before).epsilon(1e-12));
    const auto fit_after = fit_realized_variance(ds, plan);
    CHECK(fit_after.kappa == doctest::Approx(fit_before.kappa).epsilon(2e-4));
    CHECK(fit_after.v0 ==
          doctest::Approx(c * c * fit_before.v0).epsilon(2e-4));
}

TEST_CASE("zero-residual realized-variance fit recovers the curve") {
    std::vector<double> y, z;
    for (int j = 1; j <= 50; ++j) {
        y.push_back(0.05 + 0.018 * j);
        z.push_back(2.0 / std::sqrt(M_PI) * std::exp(-1.0 * y.back()));
    }
    const auto est = fit_realized_variance_curve(z, y);
    CHECK(std::abs(est.kappa - 1.0) <= 1e-6);
    CHECK(std::abs(est.v0 - 2.0) <= 1e-6);
    CHECK(est.objective <= 1e-16);
}

TEST_CASE("realized-variance fit under a step profile targets the averaged V0") {
    // V0* = (1/sqrt(theta2)) sum sigma_j^2 (tau_j - tau_{j-1}).
    const VolatilityProfile profile({0.3, 0.7}, {1.0, 2.0, 0.5});
    const double theta2 = 0.2;
    const double v0_true = profile.integral_squared() / std::sqrt(theta2);
    std::vector<double> y, z;
    for (int j = 1; j <= 40; ++j) {
        y.push_back(0.1 + 0.02 * j);
        z.push_back(v0_true / std::sqrt(M_PI) * std::exp(-0.5 * y.back()));
    }
    const auto est = fit_realized_variance_curve(z, y);
    CHECK(std::abs(est.kappa - 0.5) <= 1e-6);
    CHECK(std::abs(est.v0 - v0_true) <= 1e-5);
}

TEST_CASE("double increments") {
    SUBCASE("spatially constant fields vanish") {
        const auto ds = make_dataset_1d(20, 100, [](std::int64_t i, double) {
            return static_cast<double>(i) * 0.3;
        });
        const auto maps = thinned_grid(ds.grid, ThinningPlan(0.1, {10}));
        for (std::int64_t i = 1; i <= 20; ++i)
            CHECK(double_increment(ds, maps, i, 3).d == 0.0);
    }
    SUBCASE("linear fields telescope to the slope difference") {
        // X(t_i, y) = s_i y: D_{i,j} = (s_i - s_{i-1}) (y_j - y_{j-1}).
        std::vector<double> s{0.0, 1.0, -0.5, 2.0};
        const auto ds = make_dataset_1d(3, 100, [&](std::int64_t i, double y) {
            return s[i] * y;
        });
        const auto maps = thinned_grid(ds.grid, ThinningPlan(0.1, {10}));
        const double delta = 0.08;
        for (std::int64_t i = 1; i <= 3; ++i) {
            const auto inc = double_increment(ds, maps, i, 2);
            CHECK(inc.d ==
                  doctest::Approx((s[i] - s[i - 1]) * delta).epsilon(1e-13));
        }
    }
    SUBCASE("the tilde increment is the sum of consecutive increments") {
        const auto ds = make_dataset_1d(6, 50, [](std::int64_t i, double y) {
            return std::sin(2.1 * i + 3.0 * y) * y * (1.0 - y);
        });
        const auto maps = thinned_grid(ds.grid, ThinningPlan(0.1, {5}));
        for (std::int64_t i = 1; i < 6; ++i) {
            const auto a = double_increment(ds, maps, i, 2);
            const auto b = double_increment(ds, maps, i + 1, 2);
            REQUIRE(a.d_tilde.has_value());
            CHECK(*a.d_tilde == doctest::Approx(a.d + b.d).epsilon(1e-14));
        }
        CHECK_FALSE(double_increment(ds, maps, 6, 2).d_tilde.has_value());
    }
}

TEST_CASE("zero-residual double-increment fit recovers (kappa, theta2, V)") {
    DoubleIncrementStats stats;
    stats.r = 0.9406;
    const double kappa = 1.0, theta2 = 0.2, v = 1.0;
    const double psi = psi_r(theta2, stats.r);
    const double psi_half = psi_r(theta2, stats.r / std::sqrt(2.0));
    for (int j = 1; j <= 50; ++j) {
        const double mid = 0.05 + 0.018 * (j - 0.5);
        stats.y_mid.push_back(mid);
        stats.stat.push_back(v * std::exp(-kappa * mid) * psi);
        stats.stat_tilde.push_back(v * std::exp(-kappa * mid) * psi_half);
    }
    const auto est = fit_double_increment_curve(stats);
    CHECK(std::abs(est.kappa - kappa) <= 1e-6);
    CHECK(std::abs(est.theta2 - theta2) <= 1e-6);
    CHECK(std::abs(est.v - v) <= 1e-6);
}

TEST_CASE("double-increment fit consistency checks on the design") {
    DoubleIncrementStats stats;
    stats.r = 0.0;  // invalid spacing ratio
    stats.stat = {1.0};
    stats.stat_tilde = {1.0};
    stats.y_mid = {0.5};
    CHECK_THROWS_AS(fit_double_increment_curve(stats), ConfigError);
}

TEST_CASE("triple increments") {
    SUBCASE("additive fields are annihilated") {
        const auto ds = make_dataset_2d(5, 16, 16,
                                        [](std::int64_t i, double y, double z) {
                                            return i * (y * y + std::cos(z));
                                        });
        const auto maps =
            thinned_grid(ds.grid, ThinningPlan(0.25, {4, 4}));
        for (std::int64_t i = 1; i <= 5; ++i)
            for (std::int64_t j = 1; j <= 4; ++j)
                for (std::int64_t k = 1; k <= 4; ++k)
                    CHECK(std::abs(triple_increment(ds, maps, i, j, k).t) <=
                          1e-14);
    }
    SUBCASE("separable fields factorize") {
        std::vector<double> w{0.0, 1.0, 0.3};
        const auto u = [](double y) { return y * y; };
        const auto v = [](double z) { return std::sin(z); };
        const auto ds = make_dataset_2d(2, 16, 16,
                                        [&](std::int64_t i, double y, double z) {
                                            return w[i] * u(y) * v(z);
                                        });
        const auto maps = thinned_grid(ds.grid, ThinningPlan(0.25, {4, 4}));
        const auto yc = [&](std::int64_t j) {
            return maps.space_coord(ds.grid, 0, j);
        };
        const auto zc = [&](std::int64_t k) {
            return maps.space_coord(ds.grid, 1, k);
        };
        for (std::int64_t i = 1; i <= 2; ++i)
            for (std::int64_t j = 1; j <= 4; ++j)
                for (std::int64_t k = 1; k <= 4; ++k) {
                    const double expect = (w[i] - w[i - 1]) *
                                          (u(yc(j)) - u(yc(j - 1))) *
                                          (v(zc(k)) - v(zc(k - 1)));
                    CHECK(triple_increment(ds, maps, i, j, k).t ==
                          doctest::Approx(expect).epsilon(1e-12));
                }
    }
    SUBCASE("tilde identity") {
        const auto ds = make_dataset_2d(4, 8, 8,
                                        [](std::int64_t i, double y, double z) {
                                            return std::sin(i + 2.0 * y) * z * y;
                                        });
        const auto maps = thinned_grid(ds.grid, ThinningPlan(0.25, {2, 2}));
        const auto a = triple_increment(ds, maps, 2, 1, 1);
        const auto b = triple_increment(ds, maps, 3, 1, 1);
        REQUIRE(a.t_tilde.has_value());
        CHECK(*a.t_tilde == doctest::Approx(a.t + b.t).epsilon(1e-13));
    }
}

TEST_CASE("damping estimator on constructed exact-ratio inputs") {
    // X(t_i, y, z) = a_i y z on an 8x8x8 grid with b = 1/4, m = (2,2):
    // fine cells use delta = 1/4, the nested coarse design 1/2 and every
    // fourth time step. All arithmetic lands on powers of two.
    const auto build = [](const std::vector<double>& a) {
        return make_dataset_2d(8, 8, 8,
                               [&](std::int64_t i, double y, double z) {
                                   return a[i] * y * z;
                               });
    };
    const ThinningPlan plan(0.25, {2, 2});

    SUBCASE("energy ratio 4 gives exactly 1") {
        // Fine sum of squared diffs 16, coarse diffs (1, 0).
        const std::vector<double> a{0, 2, 1, 2, 1, 2.5, 1, 2.5, 1};
        const auto ds = build(a);
        CHECK(estimate_damping(ds, plan) == 1.0);
    }
    SUBCASE("energy ratio 2 gives 0.5") {
        const std::vector<double> a{0, 2, 1, 2, 1, 3.5, 1, 3.5, 1};
        const auto ds = build(a);
        CHECK(estimate_damping(ds, plan) ==
              doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("ratio helper") {
        CHECK(damping_from_energy_ratio(4.0, 1.0) == 1.0);
        CHECK(damping_from_energy_ratio(1.0, 4.0) == -1.0);
        CHECK_THROWS_AS(damping_from_energy_ratio(0.0, 1.0), ConfigError);
    }
    SUBCASE("divisibility requirements") {
        const std::vector<double> a{0, 2, 1, 2, 1, 2.5, 1, 2.5, 1};
        const auto ds = build(a);
        CHECK_THROWS_AS(estimate_damping(ds, ThinningPlan(0.25, {3, 3})),
                        ConfigError);
        const auto ds_bad_n = make_dataset_2d(
            6, 8, 8, [&](std::int64_t i, double y, double z) {
                return a[i] * y * z;
            });
        CHECK_THROWS_AS(estimate_damping(ds_bad_n, plan), ConfigError);
    }
}

TEST_CASE("zero-residual triple-increment fit recovers the surface") {
    const double alpha = 0.5, kappa1 = 1.0, kappa2 = 1.0, theta2 = 0.2,
                 v = 1.0;
    TripleIncrementStats stats;
    stats.m1 = 8;
    stats.m2 = 8;
    stats.r = 1.0;
    stats.time_steps = 256;
    stats.time_step = 1.0 / 256.0;
    const double psi = psi_r_alpha(theta2, stats.r, alpha);
    const double psi_half =
        psi_r_alpha(theta2, stats.r / std::sqrt(2.0), alpha);
    const double scale1 =
        stats.time_steps * std::pow(stats.time_step, alpha);
    const double scale2 =
        stats.time_steps * std::pow(2.0 * stats.time_step, alpha);
    for (int j = 1; j <= 8; ++j)
        stats.y_mid_1.push_back(0.1 + 0.1 * (j - 0.5));
    for (int k = 1; k <= 8; ++k)
        stats.y_mid_2.push_back(0.1 + 0.1 * (k - 0.5));
    for (int j = 0; j < 8; ++j)
        for (int k = 0; k < 8; ++k) {
            const double curve =
                v * std::exp(-kappa1 * stats.y_mid_1[j] -
                             kappa2 * stats.y_mid_2[k]);
            stats.sum_sq.push_back(curve * psi * scale1);
            stats.sum_sq_tilde.push_back(curve * psi_half * scale2);
        }

    SUBCASE("polynomial noise rule (c_gamma = 1)") {
        const auto est = fit_triple_increment_surface(stats, alpha,
                                                      GammaRule::Polynomial);
        CHECK(std::abs(est.kappa[0] - kappa1) <= 1e-5);
        CHECK(std::abs(est.kappa[1] - kappa2) <= 1e-5);
        CHECK(std::abs(est.theta2 - theta2) <= 1e-5);
        CHECK(std::abs(est.v - v) <= 1e-5);
        CHECK(est.alpha == alpha);
    }
    SUBCASE("spectral noise rule ties c_gamma to theta2") {
        // Regenerate the surface with c_gamma^alpha = theta2^alpha.
        TripleIncrementStats spectral = stats;
        const double cg = std::pow(theta2, alpha);
        for (auto& s : spectral.sum_sq) s *= cg;
        for (auto& s : spectral.sum_sq_tilde) s *= cg;
        const auto est = fit_triple_increment_surface(spectral, alpha,
                                                      GammaRule::Spectral);
        CHECK(std::abs(est.kappa[0] - kappa1) <= 1e-5);
        CHECK(std::abs(est.theta2 - theta2) <= 1e-4);
        CHECK(std::abs(est.v - v) <= 1e-4);
    }
    SUBCASE("alpha outside (0,2) is rejected") {
        CHECK_THROWS_AS(
            fit_triple_increment_surface(stats, 2.5, GammaRule::Polynomial),
            ConfigError);
        CHECK_THROWS_AS(
            fit_triple_increment_surface(stats, alpha, GammaRule::Cylindrical),
            ConfigError);
    }
}

TEST_CASE("default boxes") {
    CHECK(theta2_lower_bound(1.0) ==
          doctest::Approx(0.1418240821383139).epsilon(1e-12));
    const auto cfg = with_default_box_ti({}, 1.0);
    REQUIRE(cfg.box.size() == 4);
    CHECK(cfg.box[2][0] ==
          doctest::Approx(theta2_lower_bound(1.0) + 1e-6).epsilon(1e-12));
    CHECK(cfg.box[2][1] == 10.0);
}

TEST_CASE("r mismatch between axes is rejected") {
    // m1 != m2 with equal b makes the two axes imply different r.
    const auto ds = make_dataset_2d(8, 16, 16,
                                    [](std::int64_t i, double y, double z) {
                                        return i * y * z;
                                    });
    CHECK_THROWS_AS(triple_increment_stats(ds, ThinningPlan(0.25, {2, 4})),
                    ConfigError);
}

#include <cmath>

#include "doctest.h"
#include "spdecpt/common.hpp"
#include "spdecpt/model.hpp"

using namespace spdecpt;

namespace {
const double kPiSq = M_PI * M_PI;
}

TEST_CASE("eigenvalues") {
    const OperatorParams paper(0.0, {0.2}, 0.2);
    CHECK(paper.eigenvalue({1}) ==
          doctest::Approx(0.2 * kPiSq + 0.05).epsilon(1e-15));

    const OperatorParams pure_laplace(0.0, {0.0}, 1.0);
    CHECK(pure_laplace.eigenvalue({1}) == doctest::Approx(kPiSq).epsilon(1e-15));

    const OperatorParams plane(0.0, {0.0, 0.0}, 1.0);
    CHECK(plane.eigenvalue({1, 1}) == doctest::Approx(2.0 * kPiSq).epsilon(1e-15));

    // Strictly increasing in |l|.
    double prev = 0.0;
    for (int l = 1; l <= 12; ++l) {
        const double cur = paper.eigenvalue({l});
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("eigenvalue positivity is enforced at construction") {
    CHECK_THROWS_AS(OperatorParams(30.0, {0.0}, 1.0), ConfigError);
    CHECK_THROWS_AS(OperatorParams(0.0, {0.0}, -1.0), ConfigError);
    CHECK_THROWS_AS(OperatorParams(0.0, {0.0, 0.0, 0.0}, 1.0), ConfigError);
}

TEST_CASE("kappa is theta1 over theta2") {
    const OperatorParams p(0.0, {0.2, -0.4}, 0.2);
    CHECK(p.kappa()[0] == doctest::Approx(1.0));
    CHECK(p.kappa()[1] == doctest::Approx(-2.0));
}

TEST_CASE("eigenfunctions") {
    const OperatorParams p(0.0, {0.0}, 1.0);
    CHECK(p.eigenfunction({1}, {0.5}) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(p.eigenfunction({3}, {0.0}) == 0.0);
    CHECK(p.eigenfunction({3}, {1.0}) == 0.0);

    CHECK(eigenfunction_1d(2, 0.25, 1.0) ==
          doctest::Approx(std::sqrt(2.0) * std::exp(-0.125)).epsilon(1e-15));

    const OperatorParams q(0.0, {0.5, 0.5}, 1.0);
    CHECK(q.eigenfunction({2, 5}, {0.3, 0.0}) == 0.0);
    CHECK(q.eigenfunction({1, 1}, {0.5, 0.5}) ==
          doctest::Approx(2.0 * std::exp(-0.25) * 1.0).epsilon(1e-14));
}

TEST_CASE("discrete weighted orthonormality via trapezoid quadrature") {
    const double kappa = 1.0;
    const OperatorParams p(0.0, {1.0}, 1.0);
    const std::int64_t M = 1000;
    for (int l = 1; l <= 10; ++l) {
        for (int lp = l; lp <= 10; ++lp) {
            double quad = 0.0;
            for (std::int64_t j = 0; j <= M; ++j) {
                const double y = static_cast<double>(j) / M;
                const double f = p.eigenfunction({l}, {y}) *
                                 p.eigenfunction({lp}, {y}) *
                                 std::exp(kappa * y);
                quad += (j == 0 || j == M ? 0.5 : 1.0) * f;
            }
            quad /= static_cast<double>(M);
            const double expected = l == lp ? 1.0 : 0.0;
            CHECK(std::abs(quad - expected) <= 10.0 / (M * M));
        }
    }
}

TEST_CASE("volatility profile evaluation") {
    const auto flat = VolatilityProfile::constant(1.0);
    CHECK(flat.at(0.7) == 1.0);
    CHECK(flat.is_constant());

    const VolatilityProfile step({0.5}, {1.0, 1.8});
    CHECK(step.at(0.5) == 1.8);       // boundary belongs to the right interval
    CHECK(step.at(0.49999) == 1.0);
    CHECK(step.at(1.0) == 1.8);       // t = 1 maps to the last level
    CHECK(step.at(0.0) == 1.0);

    const VolatilityProfile multi({0.25, 0.5, 0.75}, {1.0, 2.0, 0.5, 3.0});
    CHECK(multi.at(0.25) == 2.0);
    CHECK(multi.at(0.74) == 0.5);
    CHECK(multi.integral_squared() ==
          doctest::Approx(0.25 * (1.0 + 4.0 + 0.25 + 9.0)).epsilon(1e-15));
}

TEST_CASE("volatility profile invariants") {
    CHECK_THROWS_AS(VolatilityProfile({0.5}, {1.0}), ConfigError);
    CHECK_THROWS_AS(VolatilityProfile({0.5}, {1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(VolatilityProfile({0.5, 0.4}, {1.0, 2.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(VolatilityProfile({0.0}, {1.0, 2.0}), ConfigError);
    CHECK_THROWS_AS(VolatilityProfile({}, {-1.0}), ConfigError);
}

TEST_CASE("noise spec rules") {
    const OperatorParams p(0.0, {0.2}, 0.2);
    const NoiseSpec cyl = NoiseSpec::cylindrical();
    CHECK(cyl.gamma({5}, p) == 1.0);
    CHECK(cyl.noise_scale({5}, p) == 1.0);
    CHECK_THROWS_AS(NoiseSpec(0.5, GammaRule::Cylindrical), ConfigError);
    CHECK_THROWS_AS(cyl.c_gamma(p), ConfigError);

    const NoiseSpec spectral(0.5, GammaRule::Spectral);
    CHECK(spectral.gamma({3}, p) == doctest::Approx(p.eigenvalue({3})));
    CHECK(spectral.c_gamma(p) == doctest::Approx(0.2));

    const NoiseSpec poly(0.5, GammaRule::Polynomial, 1.0);
    CHECK(poly.gamma({2}, p) == doctest::Approx(4.0 * kPiSq + 1.0));
    CHECK(poly.c_gamma(p) == 1.0);
    CHECK_THROWS_AS(NoiseSpec(0.5, GammaRule::Polynomial, -3.0 * kPiSq),
                    ConfigError);

    // alpha > d/2 - 1
    CHECK_THROWS_AS(NoiseSpec(0.0, GammaRule::Polynomial, 0.0)
                        .validate_for_dimension(2),
                    ConfigError);
    CHECK_NOTHROW(NoiseSpec(0.5, GammaRule::Polynomial, 0.0)
                      .validate_for_dimension(2));
    CHECK_THROWS_AS(NoiseSpec::cylindrical().validate_for_dimension(2),
                    ConfigError);

    // c1 |l|^2 <= gamma_l <= c2 |l|^2 holds on a finite mode range.
    const OperatorParams p2(0.0, {0.2, 0.2}, 0.2);
    for (int l1 = 1; l1 <= 6; ++l1)
        for (int l2 = 1; l2 <= 6; ++l2) {
            const double norm_sq = static_cast<double>(l1 * l1 + l2 * l2);
            for (const auto& spec :
                 {NoiseSpec(0.5, GammaRule::Spectral),
                  NoiseSpec(0.5, GammaRule::Polynomial, 1.0)}) {
                const double g = spec.gamma({l1, l2}, p2);
                CHECK(g >= 0.1 * norm_sq);
                CHECK(g <= 12.0 * norm_sq);
            }
        }
}

TEST_CASE("thinned grid time maps") {
    const SpaceTimeGrid grid(10000, {10000});
    SUBCASE("n = 100") {
        const ThinnedIndexMaps maps =
            thinned_grid(grid, ThinningPlan(0.0297, {100}, 100));
        REQUIRE(maps.time_indices.size() == 101);
        CHECK(maps.time_indices[0] == 0);
        CHECK(maps.time_indices[1] == 100);
        CHECK(maps.time_indices[100] == 10000);
        CHECK(maps.time_step == doctest::Approx(0.01));
    }
    SUBCASE("n = 400 steps by 25") {
        const ThinnedIndexMaps maps =
            thinned_grid(grid, ThinningPlan(0.0297, {100}, 400));
        CHECK(maps.time_indices[1] == 25);
        CHECK(maps.time_indices[400] == 10000);
    }
}

TEST_CASE("thinned grid snapping mirrors the reference design") {
    // b = 0.0297, m = 100 on M = 10000 does not land on grid nodes; points
    // snap with a recorded sub-cell displacement.
    const SpaceTimeGrid grid(10000, {10000});
    const ThinnedIndexMaps maps =
        thinned_grid(grid, ThinningPlan(0.0297, {100}));
    CHECK(maps.snapped);
    CHECK(maps.max_snap_displacement > 0.0);
    CHECK(maps.max_snap_displacement <= 0.5);
    const auto& idx = maps.space_indices[0];
    REQUIRE(idx.size() == 101);
    CHECK(idx[0] == 297);
    for (std::size_t j = 1; j < idx.size(); ++j) CHECK(idx[j] > idx[j - 1]);
    CHECK(idx[100] == 10000 - 297);
}

TEST_CASE("grid-aligned thinning does not warn") {
    const SpaceTimeGrid grid(2000, {500});
    const ThinnedIndexMaps maps = thinned_grid(grid, ThinningPlan(0.05, {50}));
    CHECK_FALSE(maps.snapped);
    CHECK(maps.space_indices[0][0] == 25);
    CHECK(maps.space_indices[0][1] == 34);
    CHECK(maps.space_indices[0][50] == 475);
}

TEST_CASE("thinning misalignment errors") {
    const SpaceTimeGrid coarse(100, {10});
    CHECK_THROWS_AS(thinned_grid(coarse, ThinningPlan(0.25, {10})),
                    AlignmentError);
    CHECK_THROWS_AS(thinned_grid(SpaceTimeGrid(10, {100}),
                                 ThinningPlan(0.1, {10}, 20)),
                    ConfigError);
}

TEST_CASE("tilde-min exponent helper") {
    const double h = 0.01;
    CHECK(tilde_min_exp(h, 1.0, 2.0) == doctest::Approx(h).epsilon(1e-15));
    CHECK(tilde_min_exp(h, 2.0, 2.0) ==
          doctest::Approx(-h * h * std::log(h)).epsilon(1e-15));
    CHECK(tilde_min_exp(h, 3.0, 2.0) == doctest::Approx(h * h).epsilon(1e-15));
    CHECK_THROWS_AS(tilde_min_exp(1.5, 1.0, 2.0), ConfigError);
}

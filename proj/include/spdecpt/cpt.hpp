#pragma once

#include <cstdint>
#include <string>

#include "spdecpt/coordinates.hpp"

namespace spdecpt {

// Outcome of the volatility change-point test.
struct TestResult {
    double t_n = 0.0;
    std::int64_t k_star = 0;   // smallest maximizing index
    double beta_sq = 0.0;      // normalization actually used
    std::int64_t n = 0;
    double p_value = 1.0;
    double critical_value = 0.0;
    double level = 0.0;
    bool reject = false;
};

// T_n = (1/beta_sq) sqrt(n/2) max_k |S_k - (k/n) S_n| over k = 1..n.
// beta_sq is either S_n itself (total quadratic variation) or a regression
// estimate of int sigma^2; the caller picks the convention.
TestResult t_statistic(const QuadraticVariation& qv, double beta_sq);

// CDF of sup |Brownian bridge|: the alternating series for x >= 0.75, the
// theta-dual series below; terms truncated at 1e-16. Zero for x <= 0.
double kolmogorov_cdf(double x);

// Inverse CDF by bisection on [1e-6, 10]; |cdf(result) - p| <= 1e-10.
double kolmogorov_quantile(double p);

// Fills the decision fields: reject iff t_n > quantile(1 - level), with
// p-value 1 - cdf(t_n).
TestResult decide(TestResult stat, double level);

std::string test_result_json(const TestResult& r);

}  // namespace spdecpt

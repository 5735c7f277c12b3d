#include "spdecpt/cpt.hpp"

#include <cmath>

#include "json.hpp"
#include "spdecpt/common.hpp"

namespace spdecpt {

TestResult t_statistic(const QuadraticVariation& qv, double beta_sq) {
    const std::int64_t n = qv.steps();
    if (n < 2) throw ConfigError("t_statistic: need at least two increments");
    if (!(beta_sq > 0.0))
        throw ConfigError("t_statistic: beta_sq must be positive");
    const double total = qv.total();
    double best = -1.0;
    std::int64_t best_k = 1;
    for (std::int64_t k = 1; k <= n; ++k) {
        const double dev = std::abs(qv.partials[k] -
                                    static_cast<double>(k) / n * total);
        if (dev > best) {
            best = dev;
            best_k = k;
        }
    }
    TestResult r;
    r.t_n = std::sqrt(0.5 * n) * best / beta_sq;
    r.k_star = best_k;
    r.beta_sq = beta_sq;
    r.n = n;
    return r;
}

double kolmogorov_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 0.75) {
        // 1 - 2 sum (-1)^{n-1} e^{-2 n^2 x^2}
        double sum = 0.0;
        double sign = 1.0;
        for (int n = 1; n < 200; ++n) {
            const double term = std::exp(-2.0 * n * n * x * x);
            if (term < 1e-16) break;
            sum += sign * term;
            sign = -sign;
        }
        return 1.0 - 2.0 * sum;
    }
    // sqrt(2 pi)/x sum e^{-(2n-1)^2 pi^2 / (8 x^2)}
    double sum = 0.0;
    for (int n = 1; n < 200; ++n) {
        const double e = (2.0 * n - 1.0) * M_PI;
        const double term = std::exp(-e * e / (8.0 * x * x));
        sum += term;
        if (term < 1e-16 * (sum + 1e-300)) break;
    }
    return std::sqrt(2.0 * M_PI) / x * sum;
}

double kolmogorov_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw ConfigError("kolmogorov_quantile: p must lie in (0,1)");
    double lo = 1e-6, hi = 10.0;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (kolmogorov_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

TestResult decide(TestResult stat, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw ConfigError("decide: level must lie in (0,1)");
    stat.level = level;
    stat.critical_value = kolmogorov_quantile(1.0 - level);
    stat.p_value = 1.0 - kolmogorov_cdf(stat.t_n);
    stat.reject = stat.t_n > stat.critical_value;
    return stat;
}

std::string test_result_json(const TestResult& r) {
    nlohmann::json j;
    j["t_n"] = r.t_n;
    j["k_star"] = r.k_star;
    j["beta_sq"] = r.beta_sq;
    j["n"] = r.n;
    j["p_value"] = r.p_value;
    j["critical_value"] = r.critical_value;
    j["level"] = r.level;
    j["reject"] = r.reject;
    return j.dump();
}

}  // namespace spdecpt

#include "spdecpt/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spdecpt/common.hpp"

namespace spdecpt {
namespace {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1] (positive half).
constexpr double kKronrodX[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kGaussW[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct GkResult {
    double value;
    double error;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f_mid = f(mid);
    double k15 = kKronrodW[7] * f_mid;
    double g7 = kGaussW[3] * f_mid;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodX[i];
        const double pair = f(mid - dx) + f(mid + dx);
        k15 += kKronrodW[i] * pair;
        if (i % 2 == 1) g7 += kGaussW[i / 2] * pair;
    }
    k15 *= half;
    g7 *= half;
    const double diff = std::abs(k15 - g7);
    return {k15, 200.0 * diff * std::sqrt(200.0 * diff)};
}

// First Bessel J0 zeros; McMahon expansion takes over where it is accurate.
constexpr double kJ0Zeros[3] = {2.404825557695773, 5.520078110286311,
                                8.653727912911013};

double j0_zero(int k) {
    if (k <= 3) return kJ0Zeros[k - 1];
    const double beta = (k - 0.25) * M_PI;
    const double u = 1.0 / (8.0 * beta);
    return beta + u - (124.0 / 3.0) * u * u * u;
}

// J0(sqrt2 u) - 2 J0(u) + 1 by series; cancellation-free for small u.
double j0_combination_series(double u) {
    const double q = u * u;
    double sum = 0.0;
    double pow4 = q * q / 16.0;  // (u^2/4)^k at k = 2
    double factorial_sq = 4.0;   // (k!)^2 at k = 2
    double sign = 1.0;
    for (int k = 2; k < 64; ++k) {
        const double term =
            sign * (std::exp2(static_cast<double>(k)) - 2.0) * pow4 / factorial_sq;
        sum += term;
        if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
        sign = -sign;
        pow4 *= q / 4.0;
        factorial_sq *= static_cast<double>(k + 1) * (k + 1);
    }
    return sum;
}

// int_X^inf x^{-s} J0(c x) dx: segments between consecutive zeros of
// J0(c x) form an alternating series; iterated averaging accelerates it.
double bessel_tail_integral(double c, double s, double X) {
    int k = 1;
    while (j0_zero(k) / c <= X) ++k;

    constexpr int kMaxSegments = 64;
    std::vector<double> partial;
    partial.reserve(kMaxSegments);
    double left = X;
    double sum = 0.0;
    const auto f = [&](double x) { return std::pow(x, -s) * bessel_j0(c * x); };
    for (int seg = 0; seg < kMaxSegments; ++seg) {
        const double right = j0_zero(k + seg) / c;
        sum += gk15(f, left, right).value;
        partial.push_back(sum);
        left = right;
        if (seg > 4 &&
            std::abs(partial[seg] - partial[seg - 1]) < 1e-16 * std::abs(X))
            break;
    }
    // Repeated averaging of the partial-sum sequence.
    std::vector<double> avg = partial;
    while (avg.size() > 1) {
        for (std::size_t i = 0; i + 1 < avg.size(); ++i)
            avg[i] = 0.5 * (avg[i] + avg[i + 1]);
        avg.pop_back();
    }
    return avg[0];
}

}  // namespace

double bessel_j0(double x) {
    x = std::abs(x);
    if (x <= 9.0) {
        const double q = 0.25 * x * x;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 64; ++k) {
            term *= -q / (static_cast<double>(k) * k);
            sum += term;
            if (std::abs(term) < 1e-18) break;
        }
        return sum;
    }
    const int nodes =
        static_cast<int>(std::ceil(0.5 * (x + 12.0 * std::cbrt(x) + 30.0)));
    const double h = M_PI / nodes;
    double sum = 0.0;
    for (int j = 0; j < nodes; ++j)
        sum += std::cos(x * std::sin((j + 0.5) * h));
    return sum / nodes;
}

double psi_r(double theta2, double r) {
    if (!(theta2 > 0.0)) throw ConfigError("psi_r: theta2 must be positive");
    if (!(r > 0.0)) throw ConfigError("psi_r: r must be positive");
    const double sq = std::sqrt(theta2);
    const double tail_integral =
        0.5 * std::sqrt(M_PI) * std::erfc(r / (2.0 * sq));
    return 2.0 / std::sqrt(M_PI * theta2) *
           (-std::expm1(-r * r / (4.0 * theta2)) + (r / sq) * tail_integral);
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, double rel_tol,
                          int max_intervals) {
    struct Interval {
        double a, b, value, error;
    };
    std::vector<Interval> work;
    const GkResult first = gk15(f, a, b);
    work.push_back({a, b, first.value, first.error});
    double total = first.value;
    double total_err = first.error;
    int splits = 0;
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (++splits > max_intervals)
            throw QuadratureError("integrate_adaptive: tolerance not reached",
                                  total_err);
        // Split the interval with the largest error estimate.
        std::size_t worst = 0;
        for (std::size_t i = 1; i < work.size(); ++i)
            if (work[i].error > work[worst].error) worst = i;
        const Interval iv = work[worst];
        const double mid = 0.5 * (iv.a + iv.b);
        const GkResult lo = gk15(f, iv.a, mid);
        const GkResult hi = gk15(f, mid, iv.b);
        total += lo.value + hi.value - iv.value;
        total_err += lo.error + hi.error - iv.error;
        work[worst] = {iv.a, mid, lo.value, lo.error};
        work.push_back({mid, iv.b, hi.value, hi.error});
    }
    return total;
}

double psi_r_alpha(double theta2, double r, double alpha, double rel_tol) {
    if (!(theta2 > 0.0))
        throw ConfigError("psi_r_alpha: theta2 must be positive");
    if (!(r > 0.0)) throw ConfigError("psi_r_alpha: r must be positive");
    if (!(alpha > 0.0 && alpha < 2.0))
        throw ConfigError("psi_r_alpha: alpha must lie in (0,2)");

    const double c = r / std::sqrt(theta2);
    const double s = 1.0 + 2.0 * alpha;
    constexpr double kGaussCut = 7.5;  // e^{-x^2} below double epsilon
    const double series_cut = std::min(kGaussCut, 2.0 / c);
    // Integrand ~ x^{3-2alpha} at the origin; integrate [0, x_lo] termwise
    // from the two power series so no quadrature node sits near 0.
    const double x_lo = std::min(0.5, series_cut);

    double head = 0.0;
    {
        double exp_coeff = 1.0;  // 1/i! with alternating sign applied below
        for (int i = 1; i <= 40; ++i) {
            exp_coeff /= static_cast<double>(i);
            const double sign_i = (i % 2 == 1) ? 1.0 : -1.0;
            double pow4 = std::pow(c * x_lo, 4.0) / 16.0;
            double factorial_sq = 4.0;
            double sign_k = 1.0;
            double inner = 0.0;
            for (int k = 2; k <= 48; ++k) {
                const double p = 2.0 * i + 2.0 * k - s + 1.0;
                const double term = sign_k *
                                    (std::exp2(static_cast<double>(k)) - 2.0) *
                                    pow4 / factorial_sq / p;
                inner += term;
                if (std::abs(term) < 1e-22 * (std::abs(inner) + 1e-300)) break;
                sign_k = -sign_k;
                pow4 *= c * c * x_lo * x_lo / 4.0;
                factorial_sq *= static_cast<double>(k + 1) * (k + 1);
            }
            const double outer = sign_i * exp_coeff *
                                 std::pow(x_lo, 2.0 * i - s + 1.0) * inner;
            head += outer;
            if (std::abs(outer) < 1e-20 * (std::abs(head) + 1e-300) && i > 2)
                break;
        }
    }

    const auto head_series = [&](double x) {
        return -std::expm1(-x * x) * std::pow(x, -s) *
               j0_combination_series(c * x);
    };
    const auto head_direct = [&](double x) {
        const double comb = bessel_j0(std::sqrt(2.0) * c * x) -
                            2.0 * bessel_j0(c * x) + 1.0;
        return -std::expm1(-x * x) * std::pow(x, -s) * comb;
    };

    const double inner_tol = 0.1 * rel_tol;
    if (x_lo < series_cut)
        head += integrate_adaptive(head_series, x_lo, series_cut, 1e-14,
                                   inner_tol);
    if (series_cut < kGaussCut)
        head += integrate_adaptive(head_direct, series_cut, kGaussCut, 1e-14,
                                   inner_tol);

    const double tail_const = std::pow(kGaussCut, -2.0 * alpha) / (2.0 * alpha);
    const double tail =
        tail_const + bessel_tail_integral(std::sqrt(2.0) * c, s, kGaussCut) -
        2.0 * bessel_tail_integral(c, s, kGaussCut);

    return 2.0 / (theta2 * M_PI) * (head + tail);
}

}  // namespace spdecpt

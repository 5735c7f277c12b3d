#include "spdecpt/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spdecpt/common.hpp"

namespace spdecpt {
namespace {

double squared_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

}  // namespace

OperatorParams::OperatorParams(double theta0, std::vector<double> theta1,
                               double theta2)
    : theta0_(theta0), theta1_(std::move(theta1)), theta2_(theta2) {
    const int d = static_cast<int>(theta1_.size());
    if (d < 1 || d > 2)
        throw ConfigError("OperatorParams: dimension must be 1 or 2");
    if (!(theta2_ > 0.0))
        throw ConfigError("OperatorParams: theta2 must be positive");
    kappa_.resize(theta1_.size());
    for (std::size_t k = 0; k < theta1_.size(); ++k)
        kappa_[k] = theta1_[k] / theta2_;
    const double lambda_min =
        theta2_ * M_PI * M_PI * d + squared_norm(theta1_) / (4.0 * theta2_) -
        theta0_;
    if (!(lambda_min > 0.0)) {
        std::ostringstream os;
        os << "OperatorParams: smallest eigenvalue " << lambda_min
           << " is not positive";
        throw ConfigError(os.str());
    }
}

double OperatorParams::eigenvalue(const ModeIndex& l) const {
    if (static_cast<int>(l.size()) != dimension())
        throw ConfigError("eigenvalue: mode index dimension mismatch");
    double norm_sq = 0.0;
    for (int lk : l) {
        if (lk < 1) throw ConfigError("eigenvalue: mode components must be >= 1");
        norm_sq += static_cast<double>(lk) * lk;
    }
    return theta2_ * M_PI * M_PI * norm_sq +
           squared_norm(theta1_) / (4.0 * theta2_) - theta0_;
}

double eigenfunction_1d(int p, double x, double a) {
    if (x == 0.0 || x == 1.0) return 0.0;  // Dirichlet boundary, exactly
    return std::sqrt(2.0) * std::exp(-0.5 * a * x) * std::sin(M_PI * p * x);
}

double OperatorParams::eigenfunction(const ModeIndex& l,
                                     const std::vector<double>& y) const {
    if (l.size() != y.size() || static_cast<int>(l.size()) != dimension())
        throw ConfigError("eigenfunction: dimension mismatch");
    double v = 1.0;
    for (std::size_t k = 0; k < l.size(); ++k)
        v *= eigenfunction_1d(l[k], y[k], kappa_[k]);
    return v;
}

VolatilityProfile::VolatilityProfile(std::vector<double> change_points,
                                     std::vector<double> levels)
    : change_points_(std::move(change_points)), levels_(std::move(levels)) {
    if (levels_.size() != change_points_.size() + 1)
        throw ConfigError("VolatilityProfile: need one more level than change points");
    for (std::size_t j = 0; j < change_points_.size(); ++j) {
        const double tau = change_points_[j];
        if (!(tau > 0.0 && tau < 1.0))
            throw ConfigError("VolatilityProfile: change points must lie in (0,1)");
        if (j > 0 && !(tau > change_points_[j - 1]))
            throw ConfigError("VolatilityProfile: change points must be strictly increasing");
    }
    for (std::size_t j = 0; j < levels_.size(); ++j) {
        if (!(levels_[j] > 0.0))
            throw ConfigError("VolatilityProfile: levels must be positive");
        if (j > 0 && levels_[j] == levels_[j - 1])
            throw ConfigError("VolatilityProfile: adjacent levels must differ");
    }
}

double VolatilityProfile::at(double t) const {
    // Interval j is [tau_{j-1}, tau_j), except the last which includes 1.
    std::size_t j = 0;
    while (j < change_points_.size() && t >= change_points_[j]) ++j;
    return levels_[j];
}

double VolatilityProfile::integral_squared() const {
    double total = 0.0;
    double left = 0.0;
    for (std::size_t j = 0; j < levels_.size(); ++j) {
        const double right =
            j < change_points_.size() ? change_points_[j] : 1.0;
        total += levels_[j] * levels_[j] * (right - left);
        left = right;
    }
    return total;
}

NoiseSpec::NoiseSpec(double alpha, GammaRule rule, double mu0)
    : alpha_(alpha), rule_(rule), mu0_(mu0) {
    if (!(alpha_ >= 0.0) || !std::isfinite(alpha_))
        throw ConfigError("NoiseSpec: alpha must be a finite nonnegative real");
    if (rule_ == GammaRule::Cylindrical && alpha_ != 0.0)
        throw ConfigError("NoiseSpec: cylindrical noise requires alpha = 0");
    if (rule_ == GammaRule::Polynomial && !(mu0_ > -2.0 * M_PI * M_PI))
        throw ConfigError("NoiseSpec: polynomial rule requires mu0 > -2 pi^2");
}

void NoiseSpec::validate_for_dimension(int d) const {
    if (!(alpha_ > d / 2.0 - 1.0))
        throw ConfigError("NoiseSpec: alpha must exceed d/2 - 1");
    if (rule_ == GammaRule::Cylindrical && d != 1)
        throw ConfigError("NoiseSpec: cylindrical noise is d = 1 only");
}

double NoiseSpec::gamma(const ModeIndex& l, const OperatorParams& params) const {
    switch (rule_) {
        case GammaRule::Cylindrical:
            return 1.0;
        case GammaRule::Spectral:
            return params.eigenvalue(l);
        case GammaRule::Polynomial: {
            double norm_sq = 0.0;
            for (int lk : l) norm_sq += static_cast<double>(lk) * lk;
            return M_PI * M_PI * norm_sq + mu0_;
        }
    }
    throw ConfigError("NoiseSpec: unknown gamma rule");
}

double NoiseSpec::noise_scale(const ModeIndex& l,
                              const OperatorParams& params) const {
    if (alpha_ == 0.0) return 1.0;
    return std::pow(gamma(l, params), -0.5 * alpha_);
}

double NoiseSpec::c_gamma(const OperatorParams& params) const {
    switch (rule_) {
        case GammaRule::Spectral:
            return params.theta2();
        case GammaRule::Polynomial:
            return 1.0;
        case GammaRule::Cylindrical:
            break;
    }
    throw ConfigError("NoiseSpec: c_gamma is undefined for cylindrical noise");
}

std::string to_string(GammaRule rule) {
    switch (rule) {
        case GammaRule::Cylindrical: return "cylindrical";
        case GammaRule::Spectral: return "spectral";
        case GammaRule::Polynomial: return "polynomial";
    }
    return "unknown";
}

GammaRule gamma_rule_from_string(const std::string& s) {
    if (s == "cylindrical") return GammaRule::Cylindrical;
    if (s == "spectral") return GammaRule::Spectral;
    if (s == "polynomial") return GammaRule::Polynomial;
    throw ConfigError("unknown gamma rule: " + s);
}

SpaceTimeGrid::SpaceTimeGrid(std::int64_t time_steps,
                             std::vector<std::int64_t> space_counts)
    : N(time_steps), M(std::move(space_counts)) {
    if (N < 1) throw ConfigError("SpaceTimeGrid: N must be >= 1");
    if (M.empty() || M.size() > 2)
        throw ConfigError("SpaceTimeGrid: dimension must be 1 or 2");
    for (std::int64_t mk : M)
        if (mk < 2) throw ConfigError("SpaceTimeGrid: each M_k must be >= 2");
}

ThinningPlan::ThinningPlan(double b_, std::vector<std::int64_t> m_,
                           std::optional<std::int64_t> n_)
    : b(b_), m(std::move(m_)), n(n_) {
    if (!(b > 0.0 && b < 0.5))
        throw ConfigError("ThinningPlan: b must lie in (0, 1/2)");
    if (m.empty() || m.size() > 2)
        throw ConfigError("ThinningPlan: dimension must be 1 or 2");
    for (std::int64_t mk : m)
        if (mk < 1) throw ConfigError("ThinningPlan: each m_k must be >= 1");
    if (n && *n < 1) throw ConfigError("ThinningPlan: n must be >= 1");
}

ThinnedIndexMaps thinned_grid(const SpaceTimeGrid& full,
                              const ThinningPlan& plan) {
    if (plan.m.size() != full.M.size())
        throw ConfigError("thinned_grid: plan dimension does not match grid");
    const std::int64_t n = plan.n.value_or(full.N);
    if (n > full.N)
        throw ConfigError("thinned_grid: n exceeds the grid's time-step count");

    ThinnedIndexMaps maps;
    const std::int64_t stride = full.N / n;
    maps.time_step = static_cast<double>(stride) / static_cast<double>(full.N);
    maps.time_indices.resize(n + 1);
    for (std::int64_t i = 0; i <= n; ++i) maps.time_indices[i] = i * stride;

    maps.max_snap_displacement = 0.0;
    maps.snapped = false;
    maps.space_indices.resize(plan.m.size());
    for (std::size_t axis = 0; axis < plan.m.size(); ++axis) {
        const std::int64_t mk = plan.m[axis];
        const std::int64_t Mk = full.M[axis];
        const double spacing = plan.nominal_spacing(static_cast<int>(axis));
        auto& idx = maps.space_indices[axis];
        idx.resize(mk + 1);
        for (std::int64_t j = 0; j <= mk; ++j) {
            const double target = (plan.b + j * spacing) * Mk;
            const auto snapped = static_cast<std::int64_t>(std::llround(target));
            const double displacement = std::abs(target - snapped);
            if (snapped < 0 || snapped > Mk) {
                std::ostringstream os;
                os << "thinned_grid: point " << j << " on axis " << axis
                   << " falls outside the grid (index " << snapped << ")";
                throw AlignmentError(os.str());
            }
            if (j > 0 && snapped <= idx[j - 1]) {
                std::ostringstream os;
                os << "thinned_grid: thinned point " << j << " on axis " << axis
                   << " collides with its predecessor after snapping "
                   << "(m too large for this grid)";
                throw AlignmentError(os.str());
            }
            if (displacement > 1e-9 * Mk) {
                maps.snapped = true;
                maps.max_snap_displacement =
                    std::max(maps.max_snap_displacement, displacement);
            }
            idx[j] = snapped;
        }
    }
    return maps;
}

double tilde_min_exp(double h, double a, double b) {
    if (!(h > 0.0 && h < 1.0))
        throw ConfigError("tilde_min_exp: h must lie in (0,1)");
    if (a < b) return std::pow(h, a);
    if (a == b) return -std::pow(h, b) * std::log(h);
    return std::pow(h, b);
}

}  // namespace spdecpt

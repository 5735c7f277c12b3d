#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spdecpt {

// Multi-index of a spectral mode; components are >= 1.
using ModeIndex = std::vector<int>;

// Coefficients of the elliptic operator driving the SPDE. The generator is
// theta2 * Laplacian + theta1 . grad + theta0 on (0,1)^d with Dirichlet
// boundary; eigenpairs are closed-form.
class OperatorParams {
public:
    OperatorParams(double theta0, std::vector<double> theta1, double theta2);

    double theta0() const { return theta0_; }
    const std::vector<double>& theta1() const { return theta1_; }
    double theta2() const { return theta2_; }
    int dimension() const { return static_cast<int>(theta1_.size()); }

    // kappa = theta1 / theta2, componentwise.
    const std::vector<double>& kappa() const { return kappa_; }

    // lambda_l = theta2 pi^2 |l|^2 + |theta1|^2 / (4 theta2) - theta0.
    double eigenvalue(const ModeIndex& l) const;

    // e_l(y; kappa) = 2^{d/2} exp(-kappa.y/2) prod_k sin(pi l_k y_k).
    // Exactly zero when any coordinate sits on the boundary.
    double eigenfunction(const ModeIndex& l, const std::vector<double>& y) const;

private:
    double theta0_;
    std::vector<double> theta1_;
    double theta2_;
    std::vector<double> kappa_;
};

// One-dimensional eigenfunction factor sqrt(2) exp(-a x / 2) sin(pi p x);
// the d-dimensional e_l is the product of these.
double eigenfunction_1d(int p, double x, double a);

// Piecewise-constant volatility sigma(t) on [0,1]. Empty change-point list
// means the constant (null-hypothesis) profile. Evaluation is
// right-continuous; t = 1 belongs to the last level.
class VolatilityProfile {
public:
    VolatilityProfile(std::vector<double> change_points,
                      std::vector<double> levels);

    static VolatilityProfile constant(double level) {
        return VolatilityProfile({}, {level});
    }

    const std::vector<double>& change_points() const { return change_points_; }
    const std::vector<double>& levels() const { return levels_; }
    bool is_constant() const { return change_points_.empty(); }

    double at(double t) const;

    // Exact integral of sigma(t)^2 over [0,1]: sum sigma_j^2 (tau_j - tau_{j-1}).
    double integral_squared() const;

private:
    std::vector<double> change_points_;
    std::vector<double> levels_;
};

enum class GammaRule { Cylindrical, Spectral, Polynomial };

// Spectral weights gamma_l^{-alpha/2} of the driving Q-Wiener process.
//   cylindrical: gamma_l = 1 (requires alpha = 0, d = 1)
//   spectral:    gamma_l = lambda_l
//   polynomial:  gamma_l = pi^2 |l|^2 + mu0, mu0 > -2 pi^2
class NoiseSpec {
public:
    NoiseSpec(double alpha, GammaRule rule, double mu0 = 0.0);

    static NoiseSpec cylindrical() {
        return NoiseSpec(0.0, GammaRule::Cylindrical);
    }

    double alpha() const { return alpha_; }
    GammaRule rule() const { return rule_; }
    double mu0() const { return mu0_; }

    void validate_for_dimension(int d) const;

    double gamma(const ModeIndex& l, const OperatorParams& params) const;
    double noise_scale(const ModeIndex& l, const OperatorParams& params) const;

    // c_gamma = lim gamma_l / (pi^2 |l|^2): theta2 for the spectral rule,
    // 1 for the polynomial rule. Not defined for the cylindrical rule.
    double c_gamma(const OperatorParams& params) const;

private:
    double alpha_;
    GammaRule rule_;
    double mu0_;
};

std::string to_string(GammaRule rule);
GammaRule gamma_rule_from_string(const std::string& s);

// Full observation grid: t_i = i/N, y_j = j/M_k per axis.
struct SpaceTimeGrid {
    SpaceTimeGrid(std::int64_t time_steps, std::vector<std::int64_t> space_counts);

    std::int64_t N;
    std::vector<std::int64_t> M;

    int dimension() const { return static_cast<int>(M.size()); }
    double time_at(std::int64_t i) const { return static_cast<double>(i) / N; }
    double space_at(int axis, std::int64_t j) const {
        return static_cast<double>(j) / M[axis];
    }
};

// Sub-grid selection: every floor(N/n)-th time point and m+1 spatial points
// y~_j = b + j (1-2b)/m per axis, snapped onto the full grid.
struct ThinningPlan {
    ThinningPlan(double b, std::vector<std::int64_t> m,
                 std::optional<std::int64_t> n = std::nullopt);

    double b;
    std::vector<std::int64_t> m;
    std::optional<std::int64_t> n;  // time thinning; absent = keep all N

    // Nominal spatial spacing (1-2b)/m_k.
    double nominal_spacing(int axis) const {
        return (1.0 - 2.0 * b) / static_cast<double>(m[axis]);
    }
};

// Integer index maps into the full dataset produced by a ThinningPlan.
struct ThinnedIndexMaps {
    std::vector<std::int64_t> time_indices;               // size n+1
    std::vector<std::vector<std::int64_t>> space_indices; // per axis, size m_k+1
    double time_step;              // Delta_n = floor(N/n)/N
    double max_snap_displacement;  // in grid cells, over all axes
    bool snapped;                  // true when any point was off-grid

    double space_coord(const SpaceTimeGrid& grid, int axis, std::int64_t j) const {
        return grid.space_at(axis, space_indices[axis][j]);
    }
};

// Resolves a plan against a grid. Off-grid points snap to the nearest node
// (displacement <= 0.5 cells by construction) and the result records the
// worst displacement; collisions or out-of-range points raise AlignmentError.
ThinnedIndexMaps thinned_grid(const SpaceTimeGrid& full, const ThinningPlan& plan);

// h^{a twiddle-min b} for h in (0,1): h^a if a < b, -h^b log h if a = b,
// h^b if a > b.
double tilde_min_exp(double h, double a, double b);

}  // namespace spdecpt

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spdecpt/model.hpp"
#include "spdecpt/simulator.hpp"

namespace spdecpt {

// Time series of one spectral coordinate on the thinned time grid.
struct CoordinatePath {
    ModeIndex ell;
    std::vector<double> times;   // t_0^n .. t_n^n
    std::vector<double> values;  // same length
    std::vector<double> kappa_used;

    std::int64_t steps() const {
        return static_cast<std::int64_t>(values.size()) - 1;
    }
};

// Partial sums S_k = sum_{i<=k} (increment_i)^2, k = 0..n. S_n doubles as
// the total-quadratic-variation volatility estimate.
struct QuadraticVariation {
    std::vector<double> partials;

    std::int64_t steps() const {
        return static_cast<std::int64_t>(partials.size()) - 1;
    }
    double total() const { return partials.back(); }
};

// Antiderivative of the weighted eigenfunction factor:
//   d/dx g_p(x:a) = sqrt(2) e^{a x / 2} sin(pi p x).
double g_antideriv(int p, double x, double a);

// Per-axis quadrature weights g_p(y_j : a) - g_p(y_{j-1} : a), j = 1..M,
// with a leading zero so the vector aligns with grid nodes 0..M.
std::vector<double> coordinate_weights(int p, std::int64_t M, double a);

// Riemann-type reconstruction of x_ell from the discrete field: the exact
// integral of the weighted eigenfunction against piecewise-constant field
// values, evaluated at the plan's thinned times. Components of ell above
// M_k/2 are rejected (the functional cannot resolve them).
CoordinatePath approx_coordinate(const FieldDataset& ds, const ModeIndex& ell,
                                 const std::vector<double>& kappa_hat,
                                 const ThinningPlan& plan);

// Oracle extraction straight from simulated coefficients (no spatial error).
CoordinatePath exact_coordinate(const CoefficientPaths& coeffs,
                                const ModeIndex& ell, std::int64_t N,
                                const ThinningPlan& plan,
                                const std::vector<double>& kappa);

QuadraticVariation partial_qv(const CoordinatePath& path);
QuadraticVariation partial_qv(const std::vector<double>& values);

// Columns: i, t, value, S.
void export_path_csv(const CoordinatePath& path, const QuadraticVariation& qv,
                     const std::string& out_path);
std::string path_csv_string(const CoordinatePath& path,
                            const QuadraticVariation& qv);

}  // namespace spdecpt

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace spdecpt {

// Compact search box plus budget for the derivative-free minimizer.
struct OptimizerConfig {
    std::vector<std::array<double, 2>> box;  // {lo, hi} per coordinate
    int coarse_grid = 17;                    // scan points per axis
    double refine_tol = 1e-10;               // objective spread at the simplex
    double x_tol = 1e-9;                     // simplex diameter, box-scaled
    std::int64_t max_evals = 100000;

    void validate() const;
};

struct MinimizeResult {
    std::vector<double> point;
    double value = 0.0;
    std::int64_t evals = 0;
};

// Coarse grid scan followed by Nelder-Mead refinement from the best grid
// point, every iterate clipped to the box. Deterministic. Never returns a
// point outside the box nor a value above the best coarse-grid value.
// Throws ConvergenceError (carrying the best point) if max_evals runs out.
MinimizeResult minimize_box(
    const std::function<double(const std::vector<double>&)>& objective,
    const OptimizerConfig& cfg);

}  // namespace spdecpt

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "spdecpt/model.hpp"
#include "spdecpt/optimizer.hpp"
#include "spdecpt/simulator.hpp"

namespace spdecpt {

// --- Realized-variance regression (d = 1): fits (kappa, V0) to
//     Z_j ~ V0 e^{-kappa y_j} / sqrt(pi) over the thinned spatial points.

struct RealizedVarianceEstimate {
    double kappa = 0.0;
    double v0 = 0.0;
    double objective = 0.0;
    std::int64_t evals = 0;
};

// Z_j = (1/(N sqrt(D))) sum_{i=1}^N (X(t_i, y~_j) - X(t_{i-1}, y~_j))^2,
// all N time steps, j in 0..m.
double z_statistic(const FieldDataset& ds, const ThinnedIndexMaps& maps,
                   std::int64_t j);
std::vector<double> z_statistics(const FieldDataset& ds,
                                 const ThinnedIndexMaps& maps);

RealizedVarianceEstimate fit_realized_variance(const FieldDataset& ds,
                                               const ThinningPlan& plan,
                                               OptimizerConfig cfg = {});
// Same contrast on precomputed statistics (j = 1..m), for synthetic inputs.
RealizedVarianceEstimate fit_realized_variance_curve(
    const std::vector<double>& z, const std::vector<double>& y,
    OptimizerConfig cfg = {});

// --- Double spatial increment regression (d = 1): fits (kappa, theta2, V)
//     through psi_r / psi_{r/sqrt2}.

struct DoubleIncrementEstimate {
    double kappa = 0.0;
    double theta2 = 0.0;
    double v = 0.0;
    double objective = 0.0;
    std::int64_t evals = 0;
};

struct DoubleIncrement {
    double d;
    std::optional<double> d_tilde;  // absent at i = N
};

// D_{i,j} = D_i X(y~_j) - D_i X(y~_{j-1}), D~ = D_i + D_{i+1}; 1 <= j <= m.
DoubleIncrement double_increment(const FieldDataset& ds,
                                 const ThinnedIndexMaps& maps, std::int64_t i,
                                 std::int64_t j);

struct DoubleIncrementStats {
    std::vector<double> stat;        // (1/(N sqrt(D))) sum D^2, j = 1..m
    std::vector<double> stat_tilde;  // (1/(N sqrt(2D))) sum D~^2
    std::vector<double> y_mid;       // (y~_{j-1} + y~_j)/2
    double r = 0.0;                  // nominal delta / sqrt(D)
};

DoubleIncrementStats double_increment_stats(const FieldDataset& ds,
                                            const ThinningPlan& plan);

DoubleIncrementEstimate fit_double_increment(const FieldDataset& ds,
                                             const ThinningPlan& plan,
                                             OptimizerConfig cfg = {});
DoubleIncrementEstimate fit_double_increment_curve(
    const DoubleIncrementStats& stats, OptimizerConfig cfg = {});

// --- d = 2 pipeline: triple increments, damping estimator, and the
//     (kappa, theta2, V) fit at a given damping exponent.

struct TripleIncrement {
    double t;
    std::optional<double> t_tilde;
};

TripleIncrement triple_increment(const FieldDataset& ds,
                                 const ThinnedIndexMaps& maps, std::int64_t i,
                                 std::int64_t j, std::int64_t k);

struct TripleIncrementStats {
    std::int64_t m1 = 0, m2 = 0;
    std::vector<double> sum_sq;        // sum_i T^2 per cell, axis-2 fastest
    std::vector<double> sum_sq_tilde;  // sum_i T~^2 per cell
    std::vector<double> y_mid_1, y_mid_2;
    double r = 0.0;
    std::int64_t time_steps = 0;       // N of the (possibly coarsened) design
    double time_step = 0.0;            // increment spacing of that design

    double mean_sq() const;            // (1/(m N)) sum of sum_sq
};

// time_stride coarsens the time grid (increments over stride steps).
TripleIncrementStats triple_increment_stats(const FieldDataset& ds,
                                            const ThinningPlan& plan,
                                            std::int64_t time_stride = 1);

// log-ratio damping estimator on the nested coarse design
// (m_k' = m_k / 2, N' = N / 4, same b); requires those divisibilities.
double estimate_damping(const FieldDataset& ds, const ThinningPlan& plan);
double damping_from_energy_ratio(double coarse_mean_sq, double fine_mean_sq);

struct TripleIncrementEstimate {
    double alpha = 0.0;
    std::array<double, 2> kappa{0.0, 0.0};
    double theta2 = 0.0;
    double v = 0.0;
    double objective = 0.0;
    std::int64_t evals = 0;
};

TripleIncrementEstimate fit_triple_increment(const FieldDataset& ds,
                                             const ThinningPlan& plan,
                                             double alpha_hat,
                                             OptimizerConfig cfg = {});
// gamma_rule decides c_gamma: the running theta2 for the spectral rule,
// 1 for the polynomial rule.
TripleIncrementEstimate fit_triple_increment_surface(
    const TripleIncrementStats& stats, double alpha_hat, GammaRule rule,
    OptimizerConfig cfg = {});

// Default compact boxes when a config carries none.
OptimizerConfig with_default_box_rv(OptimizerConfig cfg);
OptimizerConfig with_default_box_di(OptimizerConfig cfg, double r);
OptimizerConfig with_default_box_ti(OptimizerConfig cfg, double r);

// Lower admissible theta2 for the triple-increment contrast,
// -r^2 / (8 log(sqrt2 - 1)).
double theta2_lower_bound(double r);

}  // namespace spdecpt

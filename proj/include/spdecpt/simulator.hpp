#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spdecpt/model.hpp"

namespace spdecpt {

// Seed record carried through simulation outputs so a dataset can name the
// exact stream that produced it.
struct SeedRecord {
    std::uint64_t seed = 0;
    std::uint32_t replication = 0;
};

// Everything needed to draw one synthetic solution.
struct SimulationConfig {
    OperatorParams params;
    NoiseSpec noise;
    VolatilityProfile profile;
    SpaceTimeGrid grid;
    std::vector<std::int64_t> truncation;  // retained modes per axis
    SeedRecord seed;
    double initial_coefficient = 0.0;  // x_l(0) for every mode

    int dimension() const { return params.dimension(); }
    std::int64_t mode_count() const {
        std::int64_t c = 1;
        for (auto L : truncation) c *= L;
        return c;
    }
};

// Simulated spectral coefficients x_l(t_i): one row per retained mode,
// columns t_0 .. t_N. Mode rows are ordered with the last axis fastest.
struct CoefficientPaths {
    std::vector<std::int64_t> truncation;
    std::int64_t time_steps = 0;  // N
    std::vector<double> values;   // mode-major, (modes) x (N+1)
    SeedRecord seed;

    std::int64_t mode_count() const {
        std::int64_t c = 1;
        for (auto L : truncation) c *= L;
        return c;
    }
    std::int64_t flat_mode(const ModeIndex& l) const;
    const double* row(std::int64_t flat) const {
        return values.data() + flat * (time_steps + 1);
    }
    double at(std::int64_t flat, std::int64_t i) const {
        return values[flat * (time_steps + 1) + i];
    }
};

// Observed tensor X_{t_i}(y_j) plus the provenance needed to reproduce it.
// Layout is time-major; within a time slice the last axis is fastest.
struct FieldDataset {
    SpaceTimeGrid grid;
    std::vector<double> values;
    OperatorParams params;
    NoiseSpec noise;
    VolatilityProfile profile;
    std::vector<std::int64_t> truncation;
    SeedRecord seed;
    double initial_coefficient = 0.0;

    int dimension() const { return grid.dimension(); }
    std::int64_t slice_size() const {
        std::int64_t s = 1;
        for (auto Mk : grid.M) s *= Mk + 1;
        return s;
    }
    const double* slice(std::int64_t i) const {
        return values.data() + i * slice_size();
    }
    double at1(std::int64_t i, std::int64_t j) const {
        return values[i * (grid.M[0] + 1) + j];
    }
    double at2(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return values[(i * (grid.M[0] + 1) + j) * (grid.M[1] + 1) + k];
    }
};

// Exact OU transition sampling of every retained coordinate process:
//   x_l(t_i) = e^{-lambda_l D} x_l(t_{i-1})
//              + sigma(t_{i-1}) gamma_l^{-alpha/2}
//                sqrt((1 - e^{-2 lambda_l D}) / (2 lambda_l)) Z_{i,l}
// with D = 1/N and independent standard normals Z. Identical config and
// seed give bit-identical output for any thread count.
CoefficientPaths simulate_coefficients(const SimulationConfig& cfg,
                                       unsigned threads = 0);

// Truncated eigen-expansion on the grid nodes. d = 2 slices are evaluated
// as two chained matrix products over the separable basis.
FieldDataset assemble_field(const CoefficientPaths& coeffs,
                            const SimulationConfig& cfg, unsigned threads = 0);

FieldDataset simulate_field(const SimulationConfig& cfg, unsigned threads = 0);

// One coordinate path on its own (no field): the same recursion and the
// same noise stream the full simulation would use for that mode.
std::vector<double> simulate_single_coordinate(const OperatorParams& params,
                                               const NoiseSpec& noise,
                                               const VolatilityProfile& profile,
                                               std::int64_t N,
                                               const ModeIndex& ell,
                                               const std::vector<std::int64_t>& truncation,
                                               SeedRecord seed,
                                               double initial_coefficient = 0.0);

// Smallest per-axis truncation whose omitted stationary-variance tail
// sum_{l > L} gamma_l^{-alpha} / (2 lambda_l) stays below rel_tol times the
// retained sum.
std::vector<std::int64_t> suggest_truncation(const OperatorParams& params,
                                             const NoiseSpec& noise,
                                             double rel_tol = 1e-4);

// Binary dataset file: magic "SPDE", u16 format version, JSON metadata,
// little-endian f64 tensor, FNV-1a checksum.
void save_dataset(const FieldDataset& ds, const std::string& path);
FieldDataset load_dataset(const std::string& path);

// One row per (i, j...) with t, y and the field value.
void export_dataset_csv(const FieldDataset& ds, const std::string& path);

}  // namespace spdecpt

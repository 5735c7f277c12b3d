#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace spdecpt {

inline constexpr const char* kVersion = "0.1.0";

// Invalid parameter combinations detected at construction or call time.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thinned spatial points cannot be placed on the full grid.
struct AlignmentError : ConfigError {
    using ConfigError::ConfigError;
};

// Dataset file is corrupt, truncated, or from an unknown format version.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical integration failed to reach the requested tolerance.
struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& what, double achieved_tol)
        : std::runtime_error(what), achieved(achieved_tol) {}
    double achieved;
};

// Optimizer ran out of budget; carries the best point seen so far.
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& what, std::vector<double> best_point,
                     double best_value)
        : std::runtime_error(what),
          point(std::move(best_point)),
          value(best_value) {}
    std::vector<double> point;
    double value;
};

// Too many replications of a Monte Carlo batch failed.
struct ExperimentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// FNV-1a, used for dataset checksums and config hashes.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 1469598103934665603ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    return fnv1a64(s.data(), s.size());
}

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Chunked parallel loop over [begin, end). Work items must write to disjoint
// state; outputs are then independent of the thread count.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace spdecpt

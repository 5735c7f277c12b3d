#pragma once

#include <array>
#include <cstdint>

namespace spdecpt {

// Philox4x32-10 counter-based generator. A draw is a pure function of
// (key, counter), so parallel consumers need no shared state and produce
// the same stream regardless of evaluation order.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(
        const std::array<std::uint32_t, 4>& counter,
        const std::array<std::uint32_t, 2>& key);
};

// One standard normal per (seed, replication, mode, step) via Box-Muller on
// the 128-bit Philox block. Used for the OU transition noise Z_{i,l}.
double standard_normal(std::uint64_t seed, std::uint32_t replication,
                       std::uint32_t mode, std::uint32_t step);

// Uniform in (0,1), same keying, disjoint from the normal stream.
double uniform01(std::uint64_t seed, std::uint32_t replication,
                 std::uint32_t mode, std::uint32_t step);

}  // namespace spdecpt

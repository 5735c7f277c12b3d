#include "spdecpt/rng.hpp"

#include <cmath>

namespace spdecpt {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline double unit_open(std::uint32_t hi, std::uint32_t lo) {
    // 53 bits, shifted off zero so logs are finite.
    const std::uint64_t v =
        ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(v) + 0.5) * 0x1.0p-53;
}

// counter[3] tags the stream so different draw kinds never share a block.
inline std::array<std::uint32_t, 4> keyed_block(std::uint64_t seed,
                                                std::uint32_t replication,
                                                std::uint32_t mode,
                                                std::uint32_t step,
                                                std::uint32_t stream) {
    const std::array<std::uint32_t, 4> ctr{step, mode, replication, stream};
    const std::array<std::uint32_t, 2> key{
        static_cast<std::uint32_t>(seed),
        static_cast<std::uint32_t>(seed >> 32)};
    return Philox4x32::block(ctr, key);
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(
    const std::array<std::uint32_t, 4>& counter,
    const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> c = counter;
    std::array<std::uint32_t, 2> k = key;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mul_hi_lo(c[0], kMul0, hi0, lo0);
        mul_hi_lo(c[2], kMul1, hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

double standard_normal(std::uint64_t seed, std::uint32_t replication,
                       std::uint32_t mode, std::uint32_t step) {
    const auto out = keyed_block(seed, replication, mode, step, 0u);
    const double u1 = unit_open(out[0], out[1]);
    const double u2 = unit_open(out[2], out[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double uniform01(std::uint64_t seed, std::uint32_t replication,
                 std::uint32_t mode, std::uint32_t step) {
    const auto out = keyed_block(seed, replication, mode, step, 1u);
    return unit_open(out[0], out[1]);
}

}  // namespace spdecpt

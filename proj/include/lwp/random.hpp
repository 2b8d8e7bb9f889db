#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace lwp {

using Rng = std::mt19937_64;

/// Independent stream `stream` of the experiment identified by `seed`.
/// Streams depend only on (seed, stream), never on how work is scheduled.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x6c77u};
    return Rng(seq);
}

/// Uniform draw on the open interval (0,1).
inline double uniform_open(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) * (1.0 - 0x1p-53) + 0x1p-54;
}

}  // namespace lwp

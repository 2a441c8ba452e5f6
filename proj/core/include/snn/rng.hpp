#pragma once

#include <cstdint>
#include <random>

namespace snn {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t& state);

// Derives an independent stream seed from a master seed and a stream id.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return Rng(split_seed(seed, stream));
}

// Box-Muller on 53-bit uniforms, so draws do not depend on the standard library.
double standard_normal(Rng& rng);
double uniform01(Rng& rng);

}  // namespace snn

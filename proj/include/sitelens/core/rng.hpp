#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sitelens/core/error.hpp"

namespace sitelens {

/// Unbiased draw in [0, bound) from a mt19937_64 stream. Implemented by
/// rejection so results depend only on the engine's standardized output,
/// not on std::uniform_int_distribution (whose mapping varies by library).
inline std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) raise(ErrorCode::PreconditionFailed, "bounded_uniform: bound must be > 0");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                (std::numeric_limits<std::uint64_t>::max() % bound);
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % bound;
}

/// Draws k distinct indices from [0, n) uniformly without replacement,
/// in selection order. Partial Fisher-Yates; deterministic under the seed.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::mt19937_64& rng) {
    if (k > n) raise(ErrorCode::InsufficientPopulation, "sample larger than population");
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> picked;
    picked.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(bounded_uniform(rng, n - i));
        std::swap(pool[i], pool[j]);
        picked.push_back(pool[i]);
    }
    return picked;
}

}  // namespace sitelens

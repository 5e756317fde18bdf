#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace erltv {

namespace detail {
inline constexpr std::size_t kPairwiseBlock = 128;
}

/// Pairwise (tree) summation of term(0) + ... + term(count - 1).
/// Rounding error grows like O(log count) ulp instead of O(count).
template <class Term>
double pairwise_sum(std::size_t first, std::size_t count, const Term& term) {
    if (count <= detail::kPairwiseBlock) {
        double acc = 0.0;
        for (std::size_t i = first; i < first + count; ++i) acc += term(i);
        return acc;
    }
    const std::size_t half = count / 2;
    return pairwise_sum(first, half, term) + pairwise_sum(first + half, count - half, term);
}

inline double pairwise_sum(std::span<const double> values) {
    return pairwise_sum(0, values.size(), [&](std::size_t i) { return values[i]; });
}

/// splitmix64 finalizer; used to derive independent substream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of substream `stream` under `parent`.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
    return mix64(mix64(parent) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace erltv

#pragma once

#include <cstdint>

#include "invperc/lattice.hpp"

// Counter-based edge weights: each weight is a pure hash of (seed, edge), so
// generation is order-independent, regional resampling just switches the seed,
// and parallel workers need no shared state.

namespace invperc {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t edge_hash_key(const EdgeId& e) {
    std::uint64_t k =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(e.site.x)) << 32) |
        static_cast<std::uint32_t>(e.site.y);
    return mix64(k + (e.orientation == Orientation::Vertical
                          ? 0x632be59bd9b4e019ULL
                          : 0x9e3779b97f4a7c15ULL));
}

// Uniform weight in the open interval (0,1), deterministic in (seed, edge).
inline double edge_weight(std::uint64_t seed, const EdgeId& e) {
    std::uint64_t h = mix64(edge_hash_key(e) ^ (seed + 0x9e3779b97f4a7c15ULL));
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// Per-replicate stream seed for Monte Carlo loops.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return mix64(base + 0x517cc1b727220a95ULL * (index + 1));
}

}  // namespace invperc

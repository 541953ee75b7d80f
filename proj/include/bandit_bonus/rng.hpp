/**
 * @file rng.hpp
 * @brief Deterministic per-path random-number plumbing for the simulators.
 *
 * One master seed fans out to independent per-path engines through a
 * splitmix64 scramble, so results are bit-identical for a given
 * (master_seed, n_paths) regardless of thread count or scheduling: every path
 * owns its engine and consumes nothing from any shared stream.
 */
#pragma once

#include <cstdint>
#include <random>

namespace bb {

/// One splitmix64 output step (advances @p state).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t x = state;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Well-dispersed per-path seed derived from the master seed and path index.
inline std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t path_id) {
    std::uint64_t state = master_seed ^ (path_id * 0xD1342543DE82EF95ULL);
    splitmix64(state);
    return splitmix64(state);
}

/// Engine for one simulated path.
inline std::mt19937_64 make_path_engine(std::uint64_t master_seed, std::uint64_t path_id) {
    return std::mt19937_64{path_seed(master_seed, path_id)};
}

/// Draws a bit-portable U(0,1) double from a 64-bit generator (53 mantissa bits).
inline double canonical_u01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

} // namespace bb

#pragma once

#include <cstdint>
#include <random>

namespace csjl {

/// Independent substreams derived from one run seed, so that toggling a
/// strategy never perturbs, e.g., matrix generation.
enum class Stream : std::uint64_t {
    kProjection = 0x6a6c,      // JL matrix entries
    kRandomControl = 0x7263,   // index draws of the (R) strategy
    kConfiguration = 0x6366,   // random initial configurations
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t substream_seed(std::uint64_t seed, Stream stream) {
    return mix64(mix64(seed) ^ static_cast<std::uint64_t>(stream));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, Stream stream) { return Engine(substream_seed(seed, stream)); }

}  // namespace csjl

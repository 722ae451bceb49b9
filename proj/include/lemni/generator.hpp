#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "lemni/core.hpp"

namespace lemni {

// Pinned 64-bit generator (splitmix64).  The exact constants and draw order
// are documented in docs/format.md; golden fixtures depend on them.
struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1), 53 bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Independent per-index stream for batch runs: seed XOR splitmix64(index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct GenSpec {
    int n_zeros = 1;            // number of distinct zeros to draw
    std::uint64_t seed = 0;
    // Optional weights for multiplicities {1, 2, 3}.  Absent means all simple
    // (and no RNG draws are consumed for multiplicities).
    std::optional<std::array<double, 3>> multiplicity_weights;
};

// Draws n_zeros moduli uniform in [0,1), then n_zeros arguments uniform in
// [0,2*pi), then (only if weights are given) one multiplicity per zero,
// all from a single splitmix64 stream seeded with spec.seed.
Instance generate(const GenSpec& spec);

}  // namespace lemni

#pragma once

#include <cstdint>
#include <random>

namespace acet {

// Seeded random source built on mt19937_64, whose output stream is specified
// bit-for-bit by the standard. The uniform/normal transforms are hand-rolled
// because std::*_distribution output differs across standard libraries.
class RngState {
public:
    explicit RngState(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased draw from [0, n). n must be positive.
    std::uint64_t next_below(std::uint64_t n);

    // [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double normal();

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

// splitmix64 finalizer; derives independent sub-seeds from (seed, salt).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace acet

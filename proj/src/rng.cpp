#include "acet/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace acet {

std::uint64_t RngState::next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("RngState::next_below: n must be positive");
    // Rejection sampling: accept only the region evenly divisible by n.
    const std::uint64_t min = (0 - n) % n;  // 2^64 mod n
    for (;;) {
        const std::uint64_t x = engine_();
        if (x >= min) return x % n;
    }
}

double RngState::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_normal_ = true;
    return radius * std::cos(angle);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + salt * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace acet

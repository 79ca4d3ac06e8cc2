#pragma once

#include <cstdint>
#include <random>

namespace arw {

// SplitMix64 finalizer; used only to derive well-separated seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of the stream for trial `index` under master seed `seed`. Distinct
/// (seed, index) pairs give statistically independent streams.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed) ^ mix64(index ^ 0xA5A5A5A5DEADBEEFULL));
}

/// A seeded random stream. Deterministic given its construction arguments.
class Stream {
public:
    using engine_type = std::mt19937_64;

    explicit Stream(std::uint64_t seed) : engine_(mix64(seed)) {}
    Stream(std::uint64_t seed, std::uint64_t index) : engine_(derive_seed(seed, index)) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, n).
    std::uint64_t below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    double normal() { return normal_(engine_); }

    engine_type& engine() { return engine_; }

private:
    engine_type engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace arw

#pragma once

// Seeded randomness with a bit-exact, platform-independent output sequence.
//
// std::mt19937_64 has a standardized output sequence, but the std::
// distributions do not, so bounded integers and unit reals are derived here.

#include <cstdint>
#include <random>

namespace percept {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// splitmix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Combines a seed with a stream/slot identifier into an independent seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t slot) noexcept {
    return mix64(seed + kGoldenGamma * (slot + 1));
}

/// Independent sub-streams of one example seed.
enum class Stream : std::uint64_t { Parameters = 101, Render = 202, Noise = 303, Shuffle = 404 };

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream) noexcept {
    return derive_seed(seed, static_cast<std::uint64_t>(stream));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [lo, hi] (inclusive) by rejection; no modulo bias.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (hi <= lo) return lo;
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1ULL;
        if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return lo + static_cast<std::int64_t>(x % span);
    }

    /// Uniform index in [0, n).
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1));
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

}  // namespace percept

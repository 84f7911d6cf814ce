#pragma once

#include <cstdint>

namespace ecd::detail {

/// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives one stream key from (seed, index, attempt). Each component is
/// mixed before combining so that nearby indices give unrelated streams.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index,
                                   std::uint64_t attempt) {
    std::uint64_t k = mix64(seed + 0x9E3779B97F4A7C15ULL);
    k = mix64(k ^ mix64(index + 0xD1B54A32D192ED03ULL));
    k = mix64(k ^ mix64(attempt + 0x8CB92BA72F3D8DD7ULL));
    return k;
}

/// Minimal counter-based uniform generator (SplitMix64 sequence).
/// Platform-independent, so seeded outputs are reproducible byte for byte.
class SplitMix {
public:
    explicit SplitMix(std::uint64_t key) : state_(key) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_unit();
    }

private:
    std::uint64_t state_;
};

} // namespace ecd::detail

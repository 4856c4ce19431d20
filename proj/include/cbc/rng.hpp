#pragma once

#include <cstddef>
#include <cstdint>

namespace cbc {

/// SplitMix64 (Steele, Lea & Flood; increment 0x9E3779B97F4A7C15, finalizer
/// multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB). Fully specified by
/// those constants, so a seed reproduces the same stream on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform index in [0, n) by multiply-shift. n must be positive.
    std::size_t below(std::size_t n) noexcept {
        const unsigned __int128 wide = static_cast<unsigned __int128>(next()) * n;
        return static_cast<std::size_t>(wide >> 64);
    }

private:
    std::uint64_t state_;
};

/// Seed for restart `r` of a run seeded with `seed`; restart 0 keeps `seed`.
inline std::uint64_t restart_seed(std::uint64_t seed, std::size_t r) noexcept {
    if (r == 0) return seed;
    return SplitMix64(seed ^ (static_cast<std::uint64_t>(r) * 0xD1B54A32D192ED03ULL)).next();
}

}  // namespace cbc

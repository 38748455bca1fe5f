#pragma once

#include <cstdint>

namespace fgame {

/// SplitMix64 output finalizer (Stafford variant 13).
constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent substream seed from (seed, key). Used for per-node
/// streams inside a tree and for per-trial seeds in Monte-Carlo runs.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key) noexcept {
    return splitmix_finalize(seed ^ splitmix_finalize(key + 0x9e3779b97f4a7c15ULL));
}

/// SplitMix64 stream. Output depends only on the seed, so sequences are
/// identical on every platform (no std:: distributions are involved).
class RngStream {
public:
    explicit constexpr RngStream(std::uint64_t seed) noexcept : seed_(seed), state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        ++position_;
        return splitmix_finalize(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Unbiased uniform integer in {0, ..., bound-1}; bound must be > 0.
    constexpr std::uint64_t uniform_below(std::uint64_t bound) noexcept {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    constexpr std::uint64_t seed() const noexcept { return seed_; }
    constexpr std::uint64_t position() const noexcept { return position_; }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
    std::uint64_t position_ = 0;
};

}  // namespace fgame

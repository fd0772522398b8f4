#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ldist {

// Every random stream is derived from the single user seed plus a fixed role
// tag, then scrambled with splitmix64:  sub_seed = splitmix64(seed + tag).
enum class SeedRole : std::uint64_t {
    Data = 0x1001,
    Init = 0x2002,
    Shuffle = 0x3003,
    Sample = 0x4004,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, SeedRole role) noexcept {
    return splitmix64(seed + static_cast<std::uint64_t>(role));
}

/// Seeded generator with portable draws. The standard distributions are
/// implementation-defined, so uniform draws are mapped by hand to keep
/// output identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer on [0, n) by rejection; n > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace ldist

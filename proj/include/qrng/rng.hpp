#pragma once

#include <cmath>
#include <cstdint>

namespace qrng {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Identifier embedded in artifact metadata so seeds stay meaningful across versions.
inline constexpr const char* kGeneratorId = "xoshiro256++";

/// SplitMix64 finalizer. Bijective on 64-bit words; used for seeding and stream derivation.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and a tag (stage id, chunk
/// index, threshold index...). Keyed two-level hashing keeps derived streams from
/// colliding with each other or with the base stream.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
    return mix64(mix64(seed + 0x9E3779B97F4A7C15ULL) ^ (tag + 0x9E3779B97F4A7C15ULL));
}

/// xoshiro256++ (Blackman & Vigna). State is fully determined by the seed via a
/// SplitMix64 expansion, so identical seeds give identical sequences everywhere.
class Xoshiro256pp {
  public:
    using result_type = std::uint64_t;

    explicit constexpr Xoshiro256pp(std::uint64_t seed) noexcept {
        std::uint64_t x = seed;
        for (auto& w : s_) {
            x += 0x9E3779B97F4A7C15ULL;
            w = mix64(x);
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    constexpr result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 significant bits.
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double uniform01_open0() noexcept {
        return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller. Pairs are cached: draws consume the generator
    /// two uniforms at a time, which keeps the draw count per sample fixed.
    double gaussian() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform01_open0()));
        const double a = 2.0 * kPi * uniform01();
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4]{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace qrng

#ifndef WEAKINFO_RNG_HPP
#define WEAKINFO_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace weakinfo {

/// SplitMix64 step; used to expand user seeds into engine state and to derive
/// independent substreams from (seed, stream index).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/**
 * Deterministic random source.
 *
 * Identical (seed, stream) always yields the identical draw sequence on every
 * platform: seeding, uniform mapping, and the Gaussian transform are all
 * spelled out here rather than delegated to distribution objects, whose
 * algorithms the standard leaves unspecified.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        std::uint64_t s = seed ^ (0xA5A5A5A5A5A5A5A5ULL * (stream + 1));
        std::seed_seq seq{static_cast<unsigned>(splitmix64(s) >> 32),
                          static_cast<unsigned>(splitmix64(s)),
                          static_cast<unsigned>(splitmix64(s) >> 32),
                          static_cast<unsigned>(splitmix64(s))};
        engine_.seed(seq);
    }

    std::uint64_t raw() { return engine_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a log argument.
    double uniform01_open_below() { return 1.0 - uniform01(); }

    /// Standard exponential deviate.
    double exponential() { return -std::log(uniform01_open_below()); }

    /// Standard normal deviate (Box-Muller, cached spare).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = uniform01_open_below();
        const double v = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Uniform integer in [0, bound) by rejection (unbiased).
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
        std::uint64_t x;
        do {
            x = raw();
        } while (x >= limit);
        return x % bound;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0;
    bool have_spare_ = false;
};

} // namespace weakinfo

#endif

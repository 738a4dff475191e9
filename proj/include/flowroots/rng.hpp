#pragma once

// Seeded random stream with a fixed, documented algorithm so generated cases
// are reproducible across standard library implementations:
//   engine   std::mt19937_64 (bit-exact by the standard), seeded with
//            splitmix64(seed ^ stream)
//   uniform  top 53 bits of one engine draw, in [0, 1)
//   normal   Marsaglia polar method, second variate cached
// std::normal_distribution is implementation-defined, hence not used.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>

namespace flowroots {

inline constexpr const char* kRngAlgorithm = "mt19937_64/splitmix64-seed/polar-normal v1";

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : engine_(splitmix64(seed ^ splitmix64(stream))) {}

    [[nodiscard]] double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    [[nodiscard]] double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi].
    [[nodiscard]] int uniform_int(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        // rejection keeps the draw exactly uniform
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return lo + static_cast<int>(v % span);
    }

    [[nodiscard]] bool bernoulli(double p) { return uniform() < p; }

    [[nodiscard]] double normal(double mean, double stddev) {
        if (cached_) {
            const double z = *cached_;
            cached_.reset();
            return mean + stddev * z;
        }
        double u = 0.0, v = 0.0, s = 0.0;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * f;
        return mean + stddev * (u * f);
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> cached_;
};

}  // namespace flowroots

#ifndef SEGLOSS_RANDOM_HPP
#define SEGLOSS_RANDOM_HPP

#include <cstdint>
#include <random>

namespace segloss {

/// mt19937_64 with distribution code pinned here rather than left to the
/// standard library, so seeded streams are identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool coin() { return (engine_() >> 63) != 0; }

    /// Uniform integer in [0, n); n > 0. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = engine_();
        while (x >= limit) {
            x = engine_();
        }
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace segloss

#endif  // SEGLOSS_RANDOM_HPP

#ifndef SANKARM_RANDOM_HPP
#define SANKARM_RANDOM_HPP

#include <cstddef>
#include <cstdint>
#include <random>

namespace sankarm {

/// Seeded 64-bit Mersenne Twister (std::mt19937_64) with fixed conversions to
/// doubles and indices, so a seed replays the same stream on every standard
/// library. The std:: distributions are implementation-defined and are not used.
class Random {
public:
    explicit Random(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n) by rejection; n must be positive.
    std::size_t index(std::size_t n) {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
        std::uint64_t x = engine_();
        while (x > limit)
            x = engine_();
        return static_cast<std::size_t>(x % bound);
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace sankarm

#endif // SANKARM_RANDOM_HPP

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

// Seeded randomness helpers. std::mt19937_64 output is pinned by the
// standard, but the std:: distributions are not, so every draw that must
// reproduce across library implementations goes through the helpers here.

namespace tsa {

using Rng = std::mt19937_64;

// Uniform integer in [0, bound), bound > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    // rejection sampling to avoid modulo bias
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

// Uniform double in [0, 1), 53-bit resolution.
inline double uniform_real(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller.
inline double normal(Rng& rng) {
    double u1 = uniform_real(rng);
    while (u1 <= 0.0) u1 = uniform_real(rng);
    const double u2 = uniform_real(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * M_PI * u2);
}

// Truncated normal with standard deviation sigma: rejection at two
// pre-scale deviations, then rescaled so the delivered std is sigma exactly.
// Without the rescale the clipping would shrink it to 0.8796 sigma.
inline double truncated_normal(Rng& rng, double sigma) {
    constexpr double kRestore = 1.1368472343385565;  // 1/std of N(0,1) clipped to [-2, 2]
    double x;
    do {
        x = normal(rng);
    } while (x < -2.0 || x > 2.0);
    return x * kRestore * sigma;
}

// Fisher-Yates with pinned draw order.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace tsa

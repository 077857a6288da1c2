#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace wayfinder {

/**
 * Seeded RNG used everywhere in the simulator.
 *
 * The engine is std::mt19937_64 (bit-exact by the standard); the draw
 * methods are hand-rolled because the standard distributions are
 * implementation-defined and would break run reproducibility across
 * library versions.
 */
class SimRng {
public:
    explicit SimRng(std::uint64_t seed = 1) : eng_(seed) {}

    // Uniform double in [0, 1), 53 mantissa bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t bounded(std::uint64_t n) {
        // multiply-shift; bias is < 2^-64 * n, irrelevant at simulation scale
        unsigned __int128 m = static_cast<unsigned __int128>(eng_()) * n;
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Fisher-Yates; std::shuffle is implementation-defined, this is not.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Index sampled proportionally to nonnegative weights (sum must be > 0).
    std::size_t sample_weighted(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double r = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (r < acc) return i;
        }
        return weights.size() - 1;  // r landed on the rounding tail
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

}  // namespace wayfinder

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace binembed {

// Deterministic random source. std::mt19937_64 has a standard-specified
// output sequence, and the distribution transforms below are hand-rolled,
// so a given seed produces the same stream on every platform and standard
// library. All randomized steps in the library (weight init, epoch
// shuffling, LSH hyperplanes, synthetic data) draw from this class.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; consumes two uniforms per pair and
    // caches the second value.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(1.0 - u1)); // 1-u1 in (0,1], log finite
        double t = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    // Uniform index in [0, bound), bound > 0. Multiply-shift; bias is
    // O(bound / 2^64) and irrelevant at the scales used here.
    size_t index(size_t bound) {
        return static_cast<size_t>(
            (static_cast<unsigned __int128>(engine_()) * bound) >> 64);
    }

    // In-place Fisher-Yates with a fixed draw order (std::shuffle is
    // implementation-defined and would break cross-platform determinism).
    template <typename T>
    void shuffle(std::span<T> v) {
        for (size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace binembed

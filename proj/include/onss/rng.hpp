#pragma once

#include <cstdint>
#include <random>

#include "onss/geometry.hpp"

namespace onss {

// Deterministic random stream. Doubles are produced directly from the raw
// 64-bit output so results do not depend on the standard library's
// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform integer in [0, n)
    std::uint64_t uniform_index(std::uint64_t n) { return n == 0 ? 0 : eng_() % n; }

    bool chance(double p) { return next_double() < p; }

    // uniform over the closed disc of the given radius
    Vec2 uniform_disc(double radius) {
        for (;;) {
            Vec2 v{uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
            if (v.dot(v) <= 1.0) return v * radius;
        }
    }

    // derives an independent stream for a sub-component
    Rng fork(std::uint64_t salt) {
        return Rng(next_u64() ^ (salt * 0x9e3779b97f4a7c15ULL));
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace onss

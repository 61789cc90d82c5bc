#pragma once

#include <cstdint>
#include <random>

#include "psm/geometry.hpp"

namespace psm {

// Seeded stream of doubles on top of std::mt19937_64 (a pinned, portable
// algorithm). Distributions are implemented here rather than with
// std::uniform_real_distribution, whose output is not specified across
// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // uniform on [0, 1) with 53-bit resolution
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Box-Muller, one value per call (second value cached)
    double normal();

    // uniform direction: z uniform on [-1,1), azimuth uniform; 2 draws
    Point3 unit_vector();

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// n i.i.d. uniform points in the open ball B(0,radius). Inverse-CDF radius
// (radius * u^{1/3}); exactly 3 draws per point, so streams are reproducible.
PointSet sample_ball(std::size_t n, double radius, Rng& rng);

// n i.i.d. uniform points in B(0,r_outer) \ B(0,r_inner).
PointSet sample_shell(std::size_t n, double r_inner, double r_outer, Rng& rng);

}  // namespace psm

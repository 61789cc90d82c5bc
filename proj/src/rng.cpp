#include "psm/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace psm {

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

Point3 Rng::unit_vector() {
    const double z = 1.0 - 2.0 * uniform01();
    const double phi = 2.0 * M_PI * uniform01();
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
}

PointSet sample_ball(std::size_t n, double radius, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_ball: n must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("sample_ball: radius must be > 0");
    PointSet ps("ball");
    ps.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point3 dir = rng.unit_vector();
        const double r = radius * std::cbrt(rng.uniform01());
        ps.points.push_back(r * dir);
    }
    return ps;
}

PointSet sample_shell(std::size_t n, double r_inner, double r_outer, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_shell: n must be >= 1");
    if (!(0.0 < r_inner && r_inner < r_outer)) {
        throw std::invalid_argument("sample_shell: need 0 < r_inner < r_outer");
    }
    const double a3 = r_inner * r_inner * r_inner;
    const double b3 = r_outer * r_outer * r_outer;
    PointSet ps("shell");
    ps.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point3 dir = rng.unit_vector();
        const double r = std::cbrt(a3 + rng.uniform01() * (b3 - a3));
        ps.points.push_back(r * dir);
    }
    return ps;
}

}  // namespace psm

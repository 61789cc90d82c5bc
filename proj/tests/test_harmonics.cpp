#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "psm/geometry.hpp"
#include "psm/harmonics.hpp"
#include "psm/kernel.hpp"
#include "psm/rng.hpp"

using namespace psm;

namespace {

constexpr double kFourPi = 4.0 * M_PI;

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration; test-side
// quadrature oracle, independent of the design machinery.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int l = 2; l <= n; ++l) {
                const double p2 = ((2.0 * l - 1.0) * t * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) {
                x[i] = t;
                w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
                break;
            }
        }
    }
}

struct Rotation {
    double m[3][3];
    Point3 apply(const Point3& p) const {
        return {m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
                m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
                m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z};
    }
};

Rotation random_rotation(Rng& rng) {
    double q[4];
    double n2 = 0.0;
    for (double& v : q) {
        v = rng.normal();
        n2 += v * v;
    }
    const double s = 1.0 / std::sqrt(n2);
    const double a = q[0] * s, b = q[1] * s, c = q[2] * s, d = q[3] * s;
    return Rotation{{{a * a + b * b - c * c - d * d, 2 * (b * c - a * d),
                      2 * (b * d + a * c)},
                     {2 * (b * c + a * d), a * a - b * b + c * c - d * d,
                      2 * (c * d - a * b)},
                     {2 * (b * d - a * c), 2 * (c * d + a * b),
                      a * a - b * b - c * c + d * d}}};
}

}  // namespace

TEST_CASE("constant harmonic and pole values") {
    Rng rng(5);
    const Point3 u = rng.unit_vector();
    const SphericalHarmonicTable t = eval_harmonics(u, 4);
    CHECK(t(0, 0) == doctest::Approx(0.2820947917738781).epsilon(1e-14));

    const SphericalHarmonicTable pole = eval_harmonics({0, 0, 1}, 1);
    double level1 = 0.0;
    for (int m = -1; m <= 1; ++m) level1 += pole(1, m) * pole(1, m);
    CHECK(level1 == doctest::Approx(3.0 / kFourPi).epsilon(1e-14));
}

TEST_CASE("addition theorem through degree 60") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const Point3 u = rng.unit_vector();
        const SphericalHarmonicTable t = eval_harmonics(u, 60);
        for (int l = 0; l <= 60; ++l) {
            double sum = 0.0;
            for (int m = -l; m <= l; ++m) sum += t(l, m) * t(l, m);
            const double expect = (2.0 * l + 1.0) / kFourPi;
            CHECK(std::abs(sum - expect) <= 1e-12 * expect);
        }
    }
}

TEST_CASE("orthonormality on a product quadrature grid") {
    // products of harmonics up to L are band-limited to 2L: a GL x uniform
    // grid with L+1 polar nodes and 2(2L)+2 azimuthal nodes integrates them
    // exactly
    const int L = 12;
    std::vector<double> xz, wz;
    gauss_legendre(2 * L + 2, xz, wz);
    const int nphi = 4 * L + 4;
    const int n_sh = sh_count(L);
    std::vector<double> gram(n_sh * n_sh, 0.0);
    HarmonicBasis basis(L);
    std::vector<double> y(n_sh);
    for (std::size_t iz = 0; iz < xz.size(); ++iz) {
        const double s = std::sqrt(1.0 - xz[iz] * xz[iz]);
        for (int ip = 0; ip < nphi; ++ip) {
            const double phi = 2.0 * M_PI * ip / nphi;
            basis.eval({s * std::cos(phi), s * std::sin(phi), xz[iz]}, y);
            const double weight = wz[iz] * (2.0 * M_PI / nphi);
            for (int a = 0; a < n_sh; ++a) {
                for (int b = a; b < n_sh; ++b) {
                    gram[a * n_sh + b] += weight * y[a] * y[b];
                }
            }
        }
    }
    for (int a = 0; a < n_sh; ++a) {
        for (int b = a; b < n_sh; ++b) {
            const double expect = (a == b) ? 1.0 : 0.0;
            CHECK(std::abs(gram[a * n_sh + b] - expect) < 1e-12);
        }
    }
}

TEST_CASE("unit-sphere precondition and degree cap") {
    CHECK_THROWS_AS(eval_harmonics({0.5, 0, 0}, 3), std::domain_error);
    CHECK_THROWS_AS(eval_harmonics({0, 0, 1}, 101), std::invalid_argument);
    CHECK_NOTHROW(eval_harmonics({0, 0, 1 + 5e-11}, 2));
}

TEST_CASE("multipole coefficients at the origin") {
    const MultipoleCoeffs mc = multipole_coeffs({0, 0, 0}, 3);
    CHECK(mc(0, 0) == doctest::Approx(std::sqrt(kFourPi)).epsilon(1e-15));
    for (int l = 1; l <= 3; ++l) {
        for (int m = -l; m <= l; ++m) CHECK(mc(l, m) == 0.0);
    }
}

TEST_CASE("multipole coefficient magnitude bound") {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const Point3 x = rng.uniform(0.05, 1.5) * rng.unit_vector();
        const MultipoleCoeffs mc = multipole_coeffs(x, 12);
        double rl = 1.0;
        for (int l = 0; l <= 12; ++l) {
            const double cap =
                kFourPi / (2.0 * l + 1.0) * rl * std::sqrt((2.0 * l + 1.0) / kFourPi);
            for (int m = -l; m <= l; ++m) {
                CHECK(std::abs(mc(l, m)) <= cap * (1.0 + 1e-13));
            }
            rl *= x.norm();
        }
    }
}

TEST_CASE("truncated kernel: monopole, collinear sum, convergence") {
    Rng rng(29);
    for (int c : {0, 3, 9}) {
        const Point3 y = rng.uniform(1.5, 4.0) * rng.unit_vector();
        CHECK(truncated_kernel({0, 0, 0}, y, c) ==
              doctest::Approx(1.0 / y.norm()).epsilon(1e-15));
    }

    // collinear points: each level contributes |x|^l / |y|^{l+1}
    const Point3 x{0, 0, 0.5}, y{0, 0, 2.0};
    const double exact = laplace_kernel(x, y);  // 1/1.5
    for (int c : {2, 6, 10}) {
        double partial = 0.0;
        for (int l = 0; l <= c; ++l) partial += std::pow(0.5, l) / std::pow(2.0, l + 1);
        CHECK(truncated_kernel(x, y, c) == doctest::Approx(partial).epsilon(1e-13));
    }
    // geometric tail: residual at c equals (1/1.5) * (1/4)^{c+1}
    // the residual equals the tail bound here; computing it subtracts two
    // nearly equal sums, so allow ~1e-8 relative cancellation noise
    const double resid = exact - truncated_kernel(x, y, 10);
    const double expect = exact * std::pow(0.25, 11);
    CHECK(resid == doctest::Approx(expect).epsilon(1e-9));
    CHECK(resid <= expect * (1.0 + 1e-8));

    CHECK_THROWS_AS(truncated_kernel({0, 0, 2}, {0, 0, 1}, 4), std::domain_error);
    CHECK_THROWS_AS(truncated_kernel({0, 0, 1}, {0, 0, 1}, 4), std::domain_error);
}

TEST_CASE("truncation remainder bound over random pairs") {
    Rng rng(31);
    const ShellGeometry geom(1.0, 2.0);
    for (int trial = 0; trial < 250; ++trial) {
        const Point3 x = std::cbrt(rng.uniform01()) * rng.unit_vector();
        const Point3 y = 2.0 * rng.unit_vector();
        const double exact = laplace_kernel(x, y);
        for (int c : {2, 5, 10, 20}) {
            const double err = std::abs(exact - truncated_kernel(x, y, c));
            CHECK(err <= truncation_bound(geom, c) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("truncation bound arithmetic") {
    CHECK(truncation_bound(ShellGeometry(1, 2), 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(truncation_bound(ShellGeometry(1, 2), 30) ==
          doctest::Approx(4.656612873077393e-10).epsilon(1e-12));
    CHECK(truncation_bound(ShellGeometry(1, 4), 12) ==
          doctest::Approx(std::pow(0.25, 13) / 3.0).epsilon(1e-12));
    CHECK(truncation_bound(ShellGeometry(1, 4), 12) ==
          doctest::Approx(4.97e-9).epsilon(1e-2));
}

TEST_CASE("phi norm matches the stacked harmonic vector") {
    CHECK(phi_norm(0) == doctest::Approx(1.0 / std::sqrt(kFourPi)).epsilon(1e-15));
    CHECK(phi_norm(30) == doctest::Approx(31.0 / std::sqrt(kFourPi)).epsilon(1e-15));
    CHECK(phi_norm(30) == doctest::Approx(8.7449).epsilon(1e-4));

    Rng rng(37);
    for (int c : {0, 5, 30}) {
        const Point3 u = rng.unit_vector();
        const SphericalHarmonicTable t = eval_harmonics(u, c);
        double sum2 = 0.0;
        for (double v : t.values) sum2 += v * v;
        CHECK(std::abs(std::sqrt(sum2) - phi_norm(c)) < 1e-10);
    }
}

TEST_CASE("rotation equivariance of the truncated kernel") {
    Rng rng(41);
    for (int trial = 0; trial < 25; ++trial) {
        const Rotation rot = random_rotation(rng);
        const Point3 x = rng.uniform(0.1, 0.95) * rng.unit_vector();
        const Point3 y = rng.uniform(2.0, 5.0) * rng.unit_vector();
        for (int c : {1, 8, 20}) {
            const double base = truncated_kernel(x, y, c);
            const double rotated = truncated_kernel(rot.apply(x), rot.apply(y), c);
            CHECK(std::abs(base - rotated) < 1e-11);
        }
    }
}

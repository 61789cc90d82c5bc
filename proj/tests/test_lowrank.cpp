#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <vector>

#include "psm/lowrank.hpp"
#include "psm/rng.hpp"

using namespace psm;

namespace {

DenseMatrix random_matrix(std::size_t n, std::size_t m, Rng& rng) {
    DenseMatrix a(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) a(i, j) = rng.normal();
    }
    return a;
}

// planted spectrum: Q_left * diag(sv) * Q_right^T plus white noise
DenseMatrix planted_matrix(std::size_t n, std::size_t m,
                           const std::vector<double>& sv, double noise,
                           Rng& rng) {
    const std::size_t r = sv.size();
    Eigen::MatrixXd gl(n, r), gr(m, r);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < r; ++j) gl(i, j) = rng.normal();
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < r; ++j) gr(i, j) = rng.normal();
    }
    const Eigen::MatrixXd ql = Eigen::HouseholderQR<Eigen::MatrixXd>(gl)
                                   .householderQ() *
                               Eigen::MatrixXd::Identity(n, r);
    const Eigen::MatrixXd qr = Eigen::HouseholderQR<Eigen::MatrixXd>(gr)
                                   .householderQ() *
                               Eigen::MatrixXd::Identity(m, r);
    Eigen::MatrixXd a = ql * Eigen::Map<const Eigen::VectorXd>(sv.data(), r)
                                 .asDiagonal() *
                        qr.transpose();
    DenseMatrix out(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            out(i, j) = a(i, j) + noise * rng.normal();
        }
    }
    return out;
}

Eigen::MatrixXd to_eigen(const DenseMatrix& a) {
    Eigen::MatrixXd m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    }
    return m;
}

double frob(const DenseMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    }
    return std::sqrt(s);
}

// spectral norm of A - A_S [I T] Pi^T for the factor's column selection
double residual_spectral_norm(const DenseMatrix& a, const SrrqrFactors& f) {
    const Eigen::MatrixXd am = to_eigen(a);
    Eigen::MatrixXd approx(am.rows(), am.cols());
    for (int i = 0; i < f.k; ++i) approx.col(f.perm[i]) = am.col(f.perm[i]);
    for (std::size_t j = 0; j + f.k < f.perm.size(); ++j) {
        Eigen::VectorXd col = Eigen::VectorXd::Zero(am.rows());
        for (int i = 0; i < f.k; ++i) {
            col += f.t(i, j) * am.col(f.perm[i]);
        }
        approx.col(f.perm[f.k + j]) = col;
    }
    return (am - approx).jacobiSvd().singularValues()[0];
}

}  // namespace

TEST_CASE("identity matrix at full rank") {
    const std::size_t n = 6;
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
    const SrrqrFactors f = srrqr(a, static_cast<int>(n), 2.0);
    CHECK(f.k == static_cast<int>(n));
    CHECK(f.t.cols() == 0);
    for (int i = 0; i < f.k; ++i) {
        CHECK(std::abs(f.r(i, i)) == doctest::Approx(1.0));
    }
}

TEST_CASE("orthogonal columns pick the larger one") {
    DenseMatrix a(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 1e-12;
    const SrrqrFactors f = srrqr(a, 1, 2.0);
    CHECK(f.perm[0] == 0);
    CHECK(std::abs(f.t(0, 0)) <= 2.0);
    CHECK(f.t(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("exact low rank is revealed") {
    Rng rng(21);
    const DenseMatrix l = random_matrix(50, 10, rng);
    const DenseMatrix r = random_matrix(10, 80, rng);
    DenseMatrix a(50, 80);
    for (std::size_t i = 0; i < 50; ++i) {
        for (std::size_t j = 0; j < 80; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < 10; ++k) s += l(i, k) * r(k, j);
            a(i, j) = s;
        }
    }
    const SrrqrFactors f = srrqr(a, 10, 2.0);
    const double tail = *std::max_element(f.trailing_norms.begin(),
                                          f.trailing_norms.end());
    CHECK(tail <= 1e-10 * frob(a));
    CHECK_THROWS_AS(srrqr(a, 0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(srrqr(a, 51, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(srrqr(a, 10, 0.5), std::invalid_argument);
}

TEST_CASE("duplicate rows collapse to rank 1") {
    DenseMatrix a(2, 5);
    for (std::size_t j = 0; j < 5; ++j) {
        a(0, j) = std::sin(1.0 + j);
        a(1, j) = a(0, j);
    }
    const IDFactors id = id_rows(a, 1e-12, 2.0);
    CHECK(id.rank() == 1);
    CHECK(id.row_residuals[0] <= 1e-12);
    CHECK(id.row_residuals[1] <= 1e-12);
    CHECK(id.projection(id.skeleton[0] == 0 ? 1 : 0, 0) == doctest::Approx(1.0));
}

TEST_CASE("zero matrix yields an empty skeleton") {
    DenseMatrix a(4, 7);
    const IDFactors id = id_rows(a, 1e-10, 2.0);
    CHECK(id.rank() == 0);
    CHECK(id.projection.rows() == 4);
    CHECK(id.projection.cols() == 0);
    for (double r : id.row_residuals) CHECK(r == 0.0);
}

TEST_CASE("planted rank recovered against an SVD oracle") {
    Rng rng(33);
    const std::vector<double> sv{1.0, 0.4, 0.1, 0.04, 0.01};
    const DenseMatrix a = planted_matrix(40, 60, sv, 1e-9, rng);
    const double tol = 1e-6 * std::sqrt(60.0);
    const IDFactors id = id_rows(a, tol, 2.0);
    CHECK(id.rank() == 5);

    const auto svd = to_eigen(a).jacobiSvd();
    CHECK(svd.singularValues()[4] > tol);     // rank-4 cannot reach tol
    CHECK(svd.singularValues()[5] < tol);     // rank-5 suffices
}

TEST_CASE("entry bound, interpolation, and residual contracts") {
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 10 + static_cast<std::size_t>(rng.uniform01() * 50);
        const std::size_t m = 10 + static_cast<std::size_t>(rng.uniform01() * 70);
        const std::size_t r = 1 + static_cast<std::size_t>(rng.uniform01() * 8);
        std::vector<double> sv(r);
        for (std::size_t i = 0; i < r; ++i) sv[i] = std::pow(10.0, -1.5 * i / r);
        const DenseMatrix a = planted_matrix(n, m, sv, 1e-11, rng);
        const double f = 2.0;
        const double tol = 1e-7 * frob(a);
        const IDFactors id = id_rows(a, tol, f);

        CHECK(id.projection.max_abs() <= f + 1e-12);

        // skeleton rows reproduced exactly
        for (std::size_t s = 0; s < id.rank(); ++s) {
            CHECK(id.row_residuals[id.skeleton[s]] <= 1e-13 * frob(a));
        }
        // residual contract and independent recomputation
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(id.row_residuals[i] <= tol);
            double sum2 = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                double v = a(i, j);
                for (std::size_t s = 0; s < id.rank(); ++s) {
                    v -= id.projection(i, s) * a(id.skeleton[s], j);
                }
                sum2 += v * v;
            }
            const double recomputed = std::sqrt(sum2);
            CHECK(std::abs(recomputed - id.row_residuals[i]) <=
                  1e-12 * std::max(1.0, recomputed) * frob(a));
        }
    }
}

TEST_CASE("rank is monotone in the tolerance") {
    Rng rng(55);
    std::vector<double> sv(12);
    for (int i = 0; i < 12; ++i) sv[i] = std::pow(10.0, -i);
    const DenseMatrix a = planted_matrix(30, 40, sv, 0.0, rng);
    std::size_t prev = 0;
    for (double tol : {1e-1, 1e-3, 1e-5, 1e-7, 1e-9, 1e-11}) {
        const IDFactors id = id_rows(a, tol, 2.0);
        CHECK(id.rank() >= prev);
        prev = id.rank();
    }
    CHECK(prev >= 10);
}

TEST_CASE("skeleton quality versus brute force subsets") {
    Rng rng(60);
    for (int trial = 0; trial < 6; ++trial) {
        const DenseMatrix a = random_matrix(8, 12, rng);
        const Eigen::MatrixXd am = to_eigen(a);
        for (int k = 1; k <= 3; ++k) {
            const double f = 2.0;
            const SrrqrFactors fac = srrqr(a, k, f);
            const double ours = residual_spectral_norm(a, fac);

            double best = std::numeric_limits<double>::infinity();
            std::vector<int> subset(k);
            std::function<void(int, int)> rec = [&](int start, int depth) {
                if (depth == k) {
                    Eigen::MatrixXd cols(8, k);
                    for (int i = 0; i < k; ++i) cols.col(i) = am.col(subset[i]);
                    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(cols);
                    const Eigen::MatrixXd q =
                        qr.householderQ() * Eigen::MatrixXd::Identity(8, k);
                    const Eigen::MatrixXd resid = am - q * (q.transpose() * am);
                    best = std::min(best,
                                    resid.jacobiSvd().singularValues()[0]);
                    return;
                }
                for (int c = start; c < 12; ++c) {
                    subset[depth] = c;
                    rec(c + 1, depth + 1);
                }
            };
            rec(0, 0);
            const double factor =
                std::sqrt(1.0 + f * f * k * (std::min(8, 12) - k));
            CHECK(ours <= best * factor * (1.0 + 1e-10));
        }
    }
}

TEST_CASE("swap refinement enforces the entry bound on adversarial input") {
    // Kahan-type matrix: plain pivoting keeps entries of R11^{-1} R12 large,
    // so swaps must fire
    const int n = 24;
    DenseMatrix a(n, n);
    const double c = 0.95, s = std::sqrt(1.0 - c * c);
    double scale = 1.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j < i) {
                a(i, j) = 0.0;
            } else if (j == i) {
                a(i, j) = scale;
            } else {
                a(i, j) = -c * scale;
            }
        }
        scale *= s;
    }
    for (int k : {8, 15, 22}) {
        const SrrqrFactors f = srrqr(a, k, 1.5);
        CHECK(f.t.max_abs() <= 1.5 * (1.0 + 1e-10));
    }
}

#include "psm/harmonics.hpp"

#include <cmath>
#include <stdexcept>

namespace psm {

namespace {
constexpr double kFourPi = 4.0 * M_PI;
constexpr double kSqrt2 = 1.4142135623730951;
}  // namespace

HarmonicBasis::HarmonicBasis(int degree_max) : degree_max_(degree_max) {
    if (degree_max < 0 || degree_max > kMaxHarmonicDegree) {
        throw std::invalid_argument("HarmonicBasis: degree must be in [0, " +
                                    std::to_string(kMaxHarmonicDegree) + "]");
    }
    const int L = degree_max_;
    rec_a_.assign((L + 1) * (L + 1), 0.0);
    rec_b_.assign((L + 1) * (L + 1), 0.0);
    diag_.assign(L + 1, 0.0);
    for (int m = 1; m <= L; ++m) {
        diag_[m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    }
    for (int m = 0; m <= L; ++m) {
        for (int l = m + 2; l <= L; ++l) {
            const double ll = static_cast<double>(l), mm = static_cast<double>(m);
            rec_a_[l * (L + 1) + m] =
                std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
            rec_b_[l * (L + 1) + m] =
                std::sqrt((2.0 * ll + 1.0) * ((ll - 1.0) * (ll - 1.0) - mm * mm) /
                          ((2.0 * ll - 3.0) * (ll * ll - mm * mm)));
        }
    }
    work_.assign(2 * (L + 1), 0.0);
}

// Chain evaluation per order m: normalized associated Legendre values by the
// stable three-term recurrence in l, combined with cos/sin(m phi) built by
// angle addition. Writing both +-m entries as we go keeps one pass.
void HarmonicBasis::eval_zcs(double z, double s, double cphi, double sphi,
                             std::span<double> out) const {
    const int L = degree_max_;
    double pmm = std::sqrt(1.0 / kFourPi);
    double cm = 1.0, sm = 0.0;
    for (int m = 0; m <= L; ++m) {
        if (m > 0) {
            pmm *= diag_[m] * s;
            const double c_next = cm * cphi - sm * sphi;
            sm = sm * cphi + cm * sphi;
            cm = c_next;
        }
        const double f = (m == 0) ? 1.0 : kSqrt2;
        if (m == 0) {
            out[sh_index(m, 0)] = pmm;
        } else {
            out[sh_index(m, m)] = f * pmm * cm;
            out[sh_index(m, -m)] = f * pmm * sm;
        }
        if (m == L) break;
        double p_prev = pmm;
        double p = std::sqrt(2.0 * m + 3.0) * z * pmm;
        if (m == 0) {
            out[sh_index(m + 1, 0)] = p;
        } else {
            out[sh_index(m + 1, m)] = f * p * cm;
            out[sh_index(m + 1, -m)] = f * p * sm;
        }
        for (int l = m + 2; l <= L; ++l) {
            const double pn = rec_a_[l * (L + 1) + m] * z * p -
                              rec_b_[l * (L + 1) + m] * p_prev;
            p_prev = p;
            p = pn;
            if (m == 0) {
                out[sh_index(l, 0)] = p;
            } else {
                out[sh_index(l, m)] = f * p * cm;
                out[sh_index(l, -m)] = f * p * sm;
            }
        }
    }
}

void HarmonicBasis::eval(const Point3& u, std::span<double> out) const {
    const double rho = std::sqrt(u.x * u.x + u.y * u.y);
    double cphi = 1.0, sphi = 0.0;
    if (rho > 0.0) {
        cphi = u.x / rho;
        sphi = u.y / rho;
    }
    eval_zcs(u.z, rho, cphi, sphi, out);
}

void HarmonicBasis::eval_with_derivs(double theta, double phi,
                                     std::span<double> out,
                                     std::span<double> d_theta,
                                     std::span<double> d_phi) const {
    const int L = degree_max_;
    const double z = std::cos(theta), s = std::sin(theta);
    const double cphi = std::cos(phi), sphi = std::sin(phi);
    const double s_inv = 1.0 / std::max(s, 1e-300);
    double pmm = std::sqrt(1.0 / kFourPi);
    double cm = 1.0, sm = 0.0;
    for (int m = 0; m <= L; ++m) {
        if (m > 0) {
            pmm *= diag_[m] * s;
            const double c_next = cm * cphi - sm * sphi;
            sm = sm * cphi + cm * sphi;
            cm = c_next;
        }
        const double f = (m == 0) ? 1.0 : kSqrt2;
        double p_prev = 0.0;  // Pbar_{l-1}^m within the chain
        double p = pmm;
        for (int l = m; l <= L; ++l) {
            if (l > m) {
                double pn;
                if (l == m + 1) {
                    pn = std::sqrt(2.0 * m + 3.0) * z * p;
                } else {
                    pn = rec_a_[l * (L + 1) + m] * z * p -
                         rec_b_[l * (L + 1) + m] * p_prev;
                }
                p_prev = p;
                p = pn;
            }
            double dp;
            if (l == m) {
                dp = m * z * p * s_inv;
            } else {
                const double B = std::sqrt((2.0 * l + 1.0) *
                                           (static_cast<double>(l) * l - static_cast<double>(m) * m) /
                                           (2.0 * l - 1.0));
                dp = (l * z * p - B * p_prev) * s_inv;
            }
            if (m == 0) {
                out[sh_index(l, 0)] = p;
                d_theta[sh_index(l, 0)] = dp;
                d_phi[sh_index(l, 0)] = 0.0;
            } else {
                out[sh_index(l, m)] = f * p * cm;
                out[sh_index(l, -m)] = f * p * sm;
                d_theta[sh_index(l, m)] = f * dp * cm;
                d_theta[sh_index(l, -m)] = f * dp * sm;
                d_phi[sh_index(l, m)] = -m * f * p * sm;
                d_phi[sh_index(l, -m)] = m * f * p * cm;
            }
        }
    }
}

SphericalHarmonicTable eval_harmonics(const Point3& u, int degree_max) {
    const double n = u.norm();
    if (std::abs(n - 1.0) > 1e-10) {
        throw std::domain_error("eval_harmonics: direction must be unit length");
    }
    SphericalHarmonicTable tab;
    tab.degree_max = degree_max;
    tab.values.resize(sh_count(degree_max));
    const Point3 v{u.x / n, u.y / n, u.z / n};
    HarmonicBasis basis(degree_max);
    basis.eval(v, tab.values);
    return tab;
}

MultipoleCoeffs multipole_coeffs(const Point3& x, int degree_max) {
    MultipoleCoeffs mc;
    mc.degree_max = degree_max;
    mc.coeffs.assign(sh_count(degree_max), 0.0);
    const double r = x.norm();
    if (r == 0.0) {
        mc.coeffs[0] = std::sqrt(kFourPi);
        return mc;
    }
    const Point3 u{x.x / r, x.y / r, x.z / r};
    HarmonicBasis basis(degree_max);
    std::vector<double> y(sh_count(degree_max));
    basis.eval(u, y);
    double rl = 1.0;
    for (int l = 0; l <= degree_max; ++l) {
        const double scale = kFourPi / (2.0 * l + 1.0) * rl;
        for (int m = -l; m <= l; ++m) {
            mc.coeffs[sh_index(l, m)] = scale * y[sh_index(l, m)];
        }
        rl *= r;
    }
    return mc;
}

double truncated_kernel(const Point3& x, const Point3& y, int degree_max) {
    const double rx = x.norm(), ry = y.norm();
    if (!(rx < ry)) {
        throw std::domain_error(
            "truncated_kernel: requires |x| < |y| (expansion diverges)");
    }
    if (rx == 0.0) return 1.0 / ry;
    const MultipoleCoeffs mc = multipole_coeffs(x, degree_max);
    const Point3 u{y.x / ry, y.y / ry, y.z / ry};
    HarmonicBasis basis(degree_max);
    std::vector<double> yv(sh_count(degree_max));
    basis.eval(u, yv);
    double sum = 0.0;
    double ry_pow = 1.0 / ry;  // 1/|y|^{l+1}
    for (int l = 0; l <= degree_max; ++l) {
        double level = 0.0;
        for (int m = -l; m <= l; ++m) {
            level += mc.coeffs[sh_index(l, m)] * yv[sh_index(l, m)];
        }
        sum += level * ry_pow;
        ry_pow /= ry;
    }
    return sum;
}

double truncation_bound(const ShellGeometry& geom, int c) {
    if (c < 0) throw std::invalid_argument("truncation_bound: c must be >= 0");
    return std::pow(geom.r1 / geom.r2, c + 1) / (geom.r2 - geom.r1);
}

double phi_norm(int c) {
    if (c < 0) throw std::invalid_argument("phi_norm: c must be >= 0");
    return (c + 1) / std::sqrt(kFourPi);
}

}  // namespace psm

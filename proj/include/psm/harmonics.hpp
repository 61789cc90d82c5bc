#pragma once

#include <span>
#include <vector>

#include "psm/geometry.hpp"

namespace psm {

// Real spherical harmonics, orthonormal on the unit sphere:
//   Y_{l,0}  = Pbar_l^0(cos theta)
//   Y_{l,m}  = sqrt(2) Pbar_l^m(cos theta) cos(m phi),   m > 0
//   Y_{l,-m} = sqrt(2) Pbar_l^m(cos theta) sin(m phi),   m > 0
// where Pbar includes the full normalization (so Y_0^0 = 1/sqrt(4 pi)).
// Flat index for (l,m): l*(l+1) + m.

inline int sh_index(int l, int m) { return l * (l + 1) + m; }
inline int sh_count(int degree_max) { return (degree_max + 1) * (degree_max + 1); }

// Degrees above this are rejected rather than risked; the normalized
// three-term recurrence is validated well past the degrees used here.
inline constexpr int kMaxHarmonicDegree = 100;

struct SphericalHarmonicTable {
    int degree_max = 0;
    std::vector<double> values;  // (degree_max+1)^2, indexed by sh_index

    double operator()(int l, int m) const { return values[sh_index(l, m)]; }
};

struct MultipoleCoeffs {
    int degree_max = 0;
    std::vector<double> coeffs;  // (degree_max+1)^2, indexed by sh_index

    double operator()(int l, int m) const { return coeffs[sh_index(l, m)]; }
};

// Evaluator with precomputed recurrence coefficients for degree <= L.
// eval() writes all (L+1)^2 values for one unit direction; the derivative
// variant additionally produces d/dtheta and d/dphi tables (used by the
// design optimizer).
class HarmonicBasis {
public:
    explicit HarmonicBasis(int degree_max);

    int degree_max() const { return degree_max_; }

    // u must be unit length (caller's responsibility on this fast path)
    void eval(const Point3& u, std::span<double> out) const;
    void eval_with_derivs(double theta, double phi, std::span<double> out,
                          std::span<double> d_theta, std::span<double> d_phi) const;

private:
    void eval_zcs(double z, double s, double cphi, double sphi,
                  std::span<double> out) const;

    int degree_max_;
    std::vector<double> rec_a_;  // sqrt((4l^2-1)/(l^2-m^2))
    std::vector<double> rec_b_;  // companion term of the l-recurrence
    std::vector<double> diag_;   // sqrt((2m+1)/(2m))
    mutable std::vector<double> work_;  // scratch for eval_with_derivs
};

// All harmonics at one unit direction; input must satisfy ||u|-1| <= 1e-10.
SphericalHarmonicTable eval_harmonics(const Point3& u, int degree_max);

// Expansion coefficients M_l^m(x) = 4pi/(2l+1) * |x|^l * Y_l^m(x/|x|), the
// convention under which
//   1/|x-y| = sum_l sum_m M_l^m(x) Y_l^m(y/|y|) / |y|^{l+1},  |x| < |y|.
MultipoleCoeffs multipole_coeffs(const Point3& x, int degree_max);

// Partial sum of the expansion above through l = degree_max.
double truncated_kernel(const Point3& x, const Point3& y, int degree_max);

// Uniform tail bound for the truncation over x in B(0,r1), y outside B(0,r2):
// (1/(r2-r1)) * (r1/r2)^{c+1}.
double truncation_bound(const ShellGeometry& geom, int c);

// 2-norm of the stacked harmonic vector (Y_0^0,...,Y_c^c) at any unit
// direction: (c+1)/sqrt(4 pi).
double phi_norm(int c);

}  // namespace psm

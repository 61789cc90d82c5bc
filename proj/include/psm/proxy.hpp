#pragma once

#include <vector>

#include "psm/dense_matrix.hpp"
#include "psm/design.hpp"
#include "psm/geometry.hpp"
#include "psm/lowrank.hpp"

namespace psm {

// Row ID of K(X0, .) valid on the whole far field, built by compressing
// K(X0, Yp) against a quadrature discretization Yp of the proxy sphere.
struct ProxyID {
    ShellGeometry geometry;
    int c = 0;                      // expansion order; design degree >= 2c
    DesignSet design;               // unit-sphere design used for Yp
    PointSet yp;                    // design scaled to radius r2
    PointSet x0;
    std::vector<int> skeleton;      // X_rep as indices into x0
    DenseMatrix projection;         // |X0| x |X_rep|
    std::vector<double> yp_row_residuals;  // ||e_i(Yp)||_2 per row
    double epsilon = 0.0;
    double c_qr = 1.0;

    std::size_t rank() const { return skeleton.size(); }
    bool is_skeleton_row(std::size_t i) const;
    // max |U(i,:)|; 1 for skeleton rows
    double row_u_inf(std::size_t i) const;
};

// Everything the error bounds consume for one row.
struct BoundInputs {
    int c;
    double yp_residual;  // ||e_i(Yp)||_2 / sqrt(|Yp|)
    double u_inf;        // ||u_i||_inf
    int k_rep;           // |X_rep|
    ShellGeometry geometry;
};

struct TheoremBounds {
    double rowwise;   // measured residual and measured u_inf
    double a_priori;  // epsilon and the configured entry bound
};

struct ErrorReport {
    std::vector<double> l2_scaled;        // ||e_i(Y0)||_2 / sqrt(|Y0|)
    std::vector<double> max_abs;          // max_{y in Y0} |e_i(y)|
    std::vector<double> yp_residual_scaled;  // ||e_i(Yp)||_2 / sqrt(|Yp|)
    std::vector<double> bound_pointwise;  // per-row bound on |e_i(y)| over Y
    std::vector<double> bound_rowwise;
    std::vector<double> bound_a_priori;
    std::vector<bool> skeleton_row;
};

// Smallest integer c >= 1 with
//   (c_qr * min(n_x0, 2c^2+2c+2) + 1) / (r2-r1) * (r1/r2)^{c+1} <= epsilon.
int decide_c(const ShellGeometry& geom, double epsilon, double c_qr,
             std::size_t n_x0);

// Full pipeline: pick c (or cfg.c_override), fetch a design of degree >= 2c,
// scale to r2, and run the row ID of K(X0,Yp) at tol = epsilon*sqrt(|Yp|).
ProxyID build_proxy_id(const PointSet& x0, const RunConfig& cfg,
                       const DesignLibrary& library, int threads = 1);

// Same, with a caller-supplied design (must certify degree >= 2c).
ProxyID build_proxy_id(const PointSet& x0, const RunConfig& cfg,
                       const DesignSet& design, int threads = 1);

// U * K(X_rep, Y0); every y must satisfy |y| >= r2.
DenseMatrix apply_id(const ProxyID& pid, const PointSet& y0, int threads = 1);

// Pointwise row error e_i(y) = K(x_i,y) - u_i^T K(X_rep,y).
double error_function(const ProxyID& pid, std::size_t i, const Point3& y);

// (c+1)*yp_residual + (c+2)*(1 + k_rep*u_inf)/(r2-r1)*(r1/r2)^{c+1};
// bounds |e_i(y)| over the whole far field when the design degree is >= 2c.
double pointwise_error_bound(const BoundInputs& b);

// Row bounds on ||e_i(Y0)||_2/sqrt(|Y0|) for arbitrary Y0 in the far field.
TheoremBounds rowwise_error_bound(const BoundInputs& b, double epsilon,
                                  double c_qr);

// (2c+3)*epsilon, valid when c came from decide_c at this epsilon.
double simplified_error_bound(int c, double epsilon);

// Bound on max_i max_y |e_i(y)| using epsilon and the worst measured row.
double global_error_bound(const ProxyID& pid, double epsilon);

// Deterministic quasi-uniform sphere sample (Fibonacci spiral), radius r.
PointSet fibonacci_sphere(std::size_t n, double radius);

BoundInputs row_bound_inputs(const ProxyID& pid, std::size_t i);

// max |e_i(y)| over the deterministic spiral sample of Gamma; by the maximum
// principle for harmonic functions this estimates the supremum over the
// whole far field.
double max_error_on_gamma(const ProxyID& pid, std::size_t i,
                          std::size_t n_samples = 20000);

// All rows at once, sharing one pass over the sample (identical values).
std::vector<double> max_error_on_gamma_all(const ProxyID& pid,
                                           std::size_t n_samples = 20000,
                                           int threads = 1);

// Measured errors of every row against exact K(X0,Y0) plus all bounds.
// Guard: |X0|*|Y0| above 1e9 entries is refused.
ErrorReport rowwise_error_stats(const ProxyID& pid, const PointSet& y0,
                                int threads = 1);

}  // namespace psm

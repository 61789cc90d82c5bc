#include "psm/proxy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "psm/kernel.hpp"

namespace psm {

namespace {

using Eigen::MatrixXd;

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;

RowMajorMap map_of(const DenseMatrix& a) {
    return RowMajorMap(a.data(), static_cast<Eigen::Index>(a.rows()),
                       static_cast<Eigen::Index>(a.cols()));
}

PointSet skeleton_points(const ProxyID& pid) {
    PointSet xr("x_rep");
    xr.points.reserve(pid.skeleton.size());
    for (int idx : pid.skeleton) xr.points.push_back(pid.x0[idx]);
    return xr;
}

void require_far_field(const ProxyID& pid, const PointSet& y0) {
    const double limit = pid.geometry.r2 * (1.0 - 1e-12);
    for (std::size_t j = 0; j < y0.size(); ++j) {
        if (y0[j].norm() < limit) {
            throw std::domain_error("apply_id: point " + std::to_string(j) +
                                    " lies inside the proxy sphere");
        }
    }
}

}  // namespace

bool ProxyID::is_skeleton_row(std::size_t i) const {
    return std::find(skeleton.begin(), skeleton.end(), static_cast<int>(i)) !=
           skeleton.end();
}

double ProxyID::row_u_inf(std::size_t i) const {
    double m = 0.0;
    for (std::size_t j = 0; j < projection.cols(); ++j) {
        m = std::max(m, std::abs(projection(i, j)));
    }
    return m;
}

int decide_c(const ShellGeometry& geom, double epsilon, double c_qr,
             std::size_t n_x0) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("decide_c: epsilon must be > 0");
    if (!(c_qr >= 1.0)) throw std::invalid_argument("decide_c: c_qr must be >= 1");
    if (n_x0 < 1) throw std::invalid_argument("decide_c: n_x0 must be >= 1");
    const double ratio = geom.ratio();
    for (int c = 1;; ++c) {
        const double n_yp = static_cast<double>(design_size_heuristic(c));
        const double n_eff = std::min(static_cast<double>(n_x0), n_yp);
        const double lhs =
            (c_qr * n_eff + 1.0) / geom.gap() * std::pow(ratio, c + 1);
        if (lhs <= epsilon) return c;
        if (c > 100000) {
            throw std::runtime_error("decide_c: no solution found (unexpected)");
        }
    }
}

ProxyID build_proxy_id(const PointSet& x0, const RunConfig& cfg,
                       const DesignLibrary& library, int threads) {
    cfg.validate();
    const int c = cfg.c_override ? *cfg.c_override
                                 : decide_c(cfg.geometry, cfg.epsilon, cfg.c_qr,
                                            x0.size());
    return build_proxy_id(x0, cfg, library.design_for_degree(2 * c), threads);
}

ProxyID build_proxy_id(const PointSet& x0, const RunConfig& cfg,
                       const DesignSet& design, int threads) {
    cfg.validate();
    if (x0.size() == 0) throw std::invalid_argument("build_proxy_id: empty X0");
    for (std::size_t i = 0; i < x0.size(); ++i) {
        if (!(x0[i].norm() < cfg.geometry.r1)) {
            throw std::domain_error("build_proxy_id: point " + std::to_string(i) +
                                    " is not strictly inside the source ball");
        }
    }
    const int c = cfg.c_override ? *cfg.c_override
                                 : decide_c(cfg.geometry, cfg.epsilon, cfg.c_qr,
                                            x0.size());
    if (design.degree < 2 * c) {
        throw std::runtime_error(
            "build_proxy_id: design certified degree " +
            std::to_string(design.degree) + " < required 2c = " +
            std::to_string(2 * c) + "; refusing (error bound would not apply)");
    }

    ProxyID pid{cfg.geometry};
    pid.c = c;
    pid.design = design;
    pid.yp = scale_to_surface(design, cfg.geometry.r2);
    pid.x0 = x0;
    pid.epsilon = cfg.epsilon;
    pid.c_qr = cfg.c_qr;

    const DenseMatrix k_xp = kernel_matrix(x0, pid.yp, threads);
    const double tol = cfg.epsilon * std::sqrt(static_cast<double>(pid.yp.size()));
    IDFactors id = id_rows(k_xp, tol, cfg.c_qr);
    pid.skeleton = std::move(id.skeleton);
    pid.projection = std::move(id.projection);
    pid.yp_row_residuals = std::move(id.row_residuals);
    return pid;
}

DenseMatrix apply_id(const ProxyID& pid, const PointSet& y0, int threads) {
    require_far_field(pid, y0);
    const PointSet xr = skeleton_points(pid);
    const DenseMatrix k_rep = kernel_matrix(xr, y0, threads);
    const std::size_t n = pid.x0.size(), m = y0.size(), k = pid.rank();
    DenseMatrix out(n, m);
    // fixed per-entry accumulation order (not a blocked GEMM), so a column
    // of the result depends only on its own target point: applying to the
    // union of two sets concatenates the two applications bit-exactly
    std::vector<double> col(k);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t s = 0; s < k; ++s) col[s] = k_rep(s, j);
        for (std::size_t i = 0; i < n; ++i) {
            const double* urow = pid.projection.data() + i * k;
            double acc = 0.0;
            for (std::size_t s = 0; s < k; ++s) acc += urow[s] * col[s];
            out(i, j) = acc;
        }
    }
    return out;
}

double error_function(const ProxyID& pid, std::size_t i, const Point3& y) {
    double approx = 0.0;
    for (std::size_t j = 0; j < pid.skeleton.size(); ++j) {
        approx += pid.projection(i, j) * laplace_kernel(pid.x0[pid.skeleton[j]], y);
    }
    return laplace_kernel(pid.x0[i], y) - approx;
}

double pointwise_error_bound(const BoundInputs& b) {
    const double tail = std::pow(b.geometry.ratio(), b.c + 1) / b.geometry.gap();
    return (b.c + 1) * b.yp_residual +
           (b.c + 2) * (1.0 + b.k_rep * b.u_inf) * tail;
}

TheoremBounds rowwise_error_bound(const BoundInputs& b, double epsilon,
                                  double c_qr) {
    TheoremBounds out;
    out.rowwise = pointwise_error_bound(b);
    BoundInputs prior = b;
    prior.yp_residual = epsilon;
    prior.u_inf = c_qr;
    out.a_priori = pointwise_error_bound(prior);
    return out;
}

double simplified_error_bound(int c, double epsilon) {
    return (2.0 * c + 3.0) * epsilon;
}

double global_error_bound(const ProxyID& pid, double epsilon) {
    double u_inf = 0.0;
    for (std::size_t i = 0; i < pid.x0.size(); ++i) {
        u_inf = std::max(u_inf, pid.row_u_inf(i));
    }
    const double tail =
        std::pow(pid.geometry.ratio(), pid.c + 1) / pid.geometry.gap();
    return (pid.c + 1) * epsilon +
           (pid.c + 2) * (1.0 + u_inf * static_cast<double>(pid.rank())) * tail;
}

PointSet fibonacci_sphere(std::size_t n, double radius) {
    if (n < 1) throw std::invalid_argument("fibonacci_sphere: n must be >= 1");
    PointSet ps("gamma_samples");
    ps.points.reserve(n);
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / static_cast<double>(n);
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = static_cast<double>(i) * golden;
        ps.points.push_back(
            {radius * s * std::cos(phi), radius * s * std::sin(phi), radius * z});
    }
    return ps;
}

BoundInputs row_bound_inputs(const ProxyID& pid, std::size_t i) {
    return BoundInputs{
        pid.c,
        pid.yp_row_residuals[i] / std::sqrt(static_cast<double>(pid.yp.size())),
        pid.row_u_inf(i), static_cast<int>(pid.rank()), pid.geometry};
}

double max_error_on_gamma(const ProxyID& pid, std::size_t i,
                          std::size_t n_samples) {
    if (n_samples < 1000) {
        throw std::invalid_argument(
            "max_error_on_gamma: need at least 1000 samples");
    }
    const PointSet ys = fibonacci_sphere(n_samples, pid.geometry.r2);
    const PointSet xr = skeleton_points(pid);
    const DenseMatrix k_rep = kernel_matrix(xr, ys);
    double worst = 0.0;
    for (std::size_t j = 0; j < ys.size(); ++j) {
        double v = laplace_kernel(pid.x0[i], ys[j]);
        for (std::size_t s = 0; s < pid.skeleton.size(); ++s) {
            v -= pid.projection(i, s) * k_rep(s, j);
        }
        worst = std::max(worst, std::abs(v));
    }
    return worst;
}

namespace {

// shared pass over a far-field point set: per-row max |e_i| and sum e_i^2
void accumulate_errors(const ProxyID& pid, const PointSet& ys, int threads,
                       std::vector<double>& row_max, std::vector<double>& row_sum2) {
    const std::size_t n = pid.x0.size();
    const PointSet xr = skeleton_points(pid);
    row_max.assign(n, 0.0);
    row_sum2.assign(n, 0.0);
    const std::size_t block = 2048;
    const auto u = map_of(pid.projection);
    for (std::size_t j0 = 0; j0 < ys.size(); j0 += block) {
        PointSet yblk("block");
        const std::size_t j1 = std::min(ys.size(), j0 + block);
        yblk.points.assign(ys.points.begin() + j0, ys.points.begin() + j1);
        const DenseMatrix kx = kernel_matrix(pid.x0, yblk, threads);
        const DenseMatrix kr = kernel_matrix(xr, yblk, threads);
        MatrixXd e = map_of(kx);
        e.noalias() -= u * map_of(kr);
        for (std::size_t i = 0; i < n; ++i) {
            row_max[i] = std::max(row_max[i], e.row(i).cwiseAbs().maxCoeff());
            row_sum2[i] += e.row(i).squaredNorm();
        }
    }
}

}  // namespace

std::vector<double> max_error_on_gamma_all(const ProxyID& pid,
                                           std::size_t n_samples, int threads) {
    if (n_samples < 1000) {
        throw std::invalid_argument(
            "max_error_on_gamma_all: need at least 1000 samples");
    }
    const PointSet ys = fibonacci_sphere(n_samples, pid.geometry.r2);
    std::vector<double> row_max, row_sum2;
    accumulate_errors(pid, ys, threads, row_max, row_sum2);
    return row_max;
}

ErrorReport rowwise_error_stats(const ProxyID& pid, const PointSet& y0,
                                int threads) {
    if (y0.size() == 0) {
        throw std::invalid_argument("rowwise_error_stats: empty Y0");
    }
    if (static_cast<double>(pid.x0.size()) * static_cast<double>(y0.size()) >
        1e9) {
        throw std::runtime_error(
            "rowwise_error_stats: |X0|*|Y0| exceeds 1e9 entries; evaluate in "
            "blocks instead");
    }
    require_far_field(pid, y0);

    std::vector<double> row_max, row_sum2;
    accumulate_errors(pid, y0, threads, row_max, row_sum2);

    const std::size_t n = pid.x0.size();
    const double inv_sqrt_y0 = 1.0 / std::sqrt(static_cast<double>(y0.size()));
    ErrorReport rep;
    rep.l2_scaled.resize(n);
    rep.max_abs = row_max;
    rep.yp_residual_scaled.resize(n);
    rep.bound_pointwise.resize(n);
    rep.bound_rowwise.resize(n);
    rep.bound_a_priori.resize(n);
    rep.skeleton_row.assign(n, false);
    for (int idx : pid.skeleton) rep.skeleton_row[idx] = true;
    for (std::size_t i = 0; i < n; ++i) {
        rep.l2_scaled[i] = std::sqrt(row_sum2[i]) * inv_sqrt_y0;
        const BoundInputs b = row_bound_inputs(pid, i);
        rep.yp_residual_scaled[i] = b.yp_residual;
        rep.bound_pointwise[i] = pointwise_error_bound(b);
        const TheoremBounds tb = rowwise_error_bound(b, pid.epsilon, pid.c_qr);
        rep.bound_rowwise[i] = tb.rowwise;
        rep.bound_a_priori[i] = tb.a_priori;
    }
    return rep;
}

}  // namespace psm

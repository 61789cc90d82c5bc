#include "psm/design.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "psm/harmonics.hpp"

#ifndef PSM_BUNDLED_DESIGN_DIR
#define PSM_BUNDLED_DESIGN_DIR "data/designs"
#endif

namespace psm {

namespace {

// first-moment defects d_lm = (1/N) sum_j Y_lm(p_j), l = 1..t
std::vector<double> moment_defects(const std::vector<Point3>& unit_pts, int t) {
    HarmonicBasis basis(t);
    std::vector<double> buf(sh_count(t));
    std::vector<double> sums(sh_count(t), 0.0);
    for (const Point3& p : unit_pts) {
        basis.eval(p, buf);
        for (std::size_t k = 0; k < sums.size(); ++k) sums[k] += buf[k];
    }
    const double inv_n = 1.0 / static_cast<double>(unit_pts.size());
    for (double& v : sums) v *= inv_n;
    return sums;
}

std::vector<Point3> normalized_copy(const PointSet& points, double unit_tol,
                                    const char* who) {
    if (points.size() == 0) {
        throw std::invalid_argument(std::string(who) + ": empty point set");
    }
    std::vector<Point3> out;
    out.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double r = points[i].norm();
        if (!(std::abs(r - 1.0) <= unit_tol)) {
            throw std::runtime_error(std::string(who) + ": point " +
                                     std::to_string(i) + " is off the unit sphere (|p|=" +
                                     std::to_string(r) + ")");
        }
        out.push_back((1.0 / r) * points[i]);
    }
    return out;
}

}  // namespace

ValidationReport validate_design(const PointSet& points, int t, double tol) {
    ValidationReport rep;
    if (t < 0) throw std::invalid_argument("validate_design: t must be >= 0");
    if (t == 0) {
        rep.pass = points.size() > 0;
        return rep;
    }
    const auto unit_pts = normalized_copy(points, 1e-8, "validate_design");
    const auto d = moment_defects(unit_pts, t);
    rep.pass = true;
    for (int l = 1; l <= t; ++l) {
        for (int m = -l; m <= l; ++m) {
            const double defect = std::abs(d[sh_index(l, m)]);
            rep.defects.push_back({l, m, defect});
            rep.residual = std::max(rep.residual, defect);
            if (defect > tol && rep.first_fail_l < 0) {
                rep.pass = false;
                rep.first_fail_l = l;
                rep.first_fail_m = m;
            }
        }
    }
    return rep;
}

namespace {

// "# t=<degree> N=<count>" header, if present
bool parse_design_header(const std::string& path, int& t, int& n) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] != '#') return false;
        int tv = -1, nv = -1;
        const auto tp = line.find("t=");
        const auto np = line.find("N=");
        if (tp != std::string::npos) tv = std::atoi(line.c_str() + tp + 2);
        if (np != std::string::npos) nv = std::atoi(line.c_str() + np + 2);
        if (tv >= 0 && nv >= 0) {
            t = tv;
            n = nv;
            return true;
        }
        return false;
    }
    return false;
}

}  // namespace

DesignSet load_design(const std::string& path, int expected_degree, double tol) {
    PointSet raw = load_points(path, "design");
    int header_t = -1, header_n = -1;
    parse_design_header(path, header_t, header_n);

    const auto unit_pts = normalized_copy(raw, 1e-8, "load_design");
    PointSet pts(unit_pts, "design:" + path);

    const int t_check = std::min(kMaxHarmonicDegree,
                                 std::max(expected_degree, header_t));
    ValidationReport rep = validate_design(pts, t_check, tol);

    // certified degree: longest run of fully passing levels from l = 1
    int certified = t_check;
    double certified_residual = 0.0;
    {
        std::vector<double> level_max(t_check + 1, 0.0);
        for (const auto& d : rep.defects) {
            level_max[d.l] = std::max(level_max[d.l], d.defect);
        }
        for (int l = 1; l <= t_check; ++l) {
            if (level_max[l] > tol) {
                certified = l - 1;
                break;
            }
            certified_residual = std::max(certified_residual, level_max[l]);
        }
    }
    if (certified < expected_degree) {
        throw std::runtime_error(
            path + ": certification reached degree " + std::to_string(certified) +
            " < expected " + std::to_string(expected_degree) +
            "; first failing (l,m)=(" + std::to_string(rep.first_fail_l) + "," +
            std::to_string(rep.first_fail_m) + ")");
    }
    DesignSet d;
    d.points = std::move(pts);
    d.degree = certified;
    d.source = DesignSource::file;
    d.residual = certified_residual;
    d.validation_tol = tol;
    return d;
}

void save_design(const std::string& path, const DesignSet& d) {
    char header[64];
    std::snprintf(header, sizeof(header), "t=%d N=%zu", d.degree,
                  d.points.size());
    save_points(path, d.points, header);
}

namespace {

struct AngleConfig {
    Eigen::VectorXd theta;
    Eigen::VectorXd phi;
};

// attempt 0 is the plain spiral; later restarts rotate and jitter it
AngleConfig spiral_init(std::size_t n, Rng& rng, bool perturb) {
    AngleConfig cfg;
    cfg.theta.resize(static_cast<Eigen::Index>(n));
    cfg.phi.resize(static_cast<Eigen::Index>(n));
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    const double rot = perturb ? rng.uniform(0.0, 2.0 * M_PI) : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / static_cast<double>(n);
        double theta = std::acos(z), phi = i * golden + rot;
        if (perturb) {
            theta += 3e-3 * rng.normal();
            phi += 3e-3 * rng.normal();
        }
        cfg.theta[i] = std::clamp(theta, 1e-6, M_PI - 1e-6);
        cfg.phi[i] = std::fmod(phi, 2.0 * M_PI);
    }
    return cfg;
}

// residuals r_lm (l = 1..t) and optionally the Jacobian wrt (theta_j, phi_j)
void design_residuals(const HarmonicBasis& basis, const AngleConfig& cfg, int t,
                      Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    const std::size_t n = static_cast<std::size_t>(cfg.theta.size());
    const int n_sh = sh_count(t);
    std::vector<double> y(n_sh), dth(n_sh), dph(n_sh);
    r.setZero(n_sh - 1);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        basis.eval_with_derivs(cfg.theta[j], cfg.phi[j], y, dth, dph);
        for (int k = 1; k < n_sh; ++k) r[k - 1] += y[k];
        if (jac) {
            for (int k = 1; k < n_sh; ++k) {
                (*jac)(k - 1, static_cast<Eigen::Index>(j)) = dth[k] * inv_n;
                (*jac)(k - 1, static_cast<Eigen::Index>(n + j)) = dph[k] * inv_n;
            }
        }
    }
    r *= inv_n;
}

PointSet angles_to_points(const AngleConfig& cfg) {
    PointSet ps("design:generated");
    ps.points.reserve(static_cast<std::size_t>(cfg.theta.size()));
    for (Eigen::Index j = 0; j < cfg.theta.size(); ++j) {
        const double s = std::sin(cfg.theta[j]), z = std::cos(cfg.theta[j]);
        ps.points.push_back(
            {s * std::cos(cfg.phi[j]), s * std::sin(cfg.phi[j]), z});
    }
    return ps;
}

}  // namespace

namespace {

// damped Gauss-Newton on the defect system from one starting layout;
// consumes residual evaluations from the shared budget
double lm_descend(const HarmonicBasis& basis, int t, AngleConfig& cfg,
                  std::size_t& evals, std::size_t max_evals) {
    const std::size_t n_points = static_cast<std::size_t>(cfg.theta.size());
    const Eigen::Index R = sh_count(t) - 1;
    const Eigen::Index nv = 2 * static_cast<Eigen::Index>(n_points);
    Eigen::VectorXd r(R);
    Eigen::MatrixXd J(R, nv);
    Eigen::MatrixXd A(nv, nv);
    double lambda = 1e-4;

    design_residuals(basis, cfg, t, r, &J);
    ++evals;
    double f = 0.5 * r.squaredNorm();

    while (evals < max_evals && r.cwiseAbs().maxCoeff() > 2e-13) {
        A.setZero();
        A.selfadjointView<Eigen::Lower>().rankUpdate(J.transpose());
        const Eigen::VectorXd g = J.transpose() * r;
        const Eigen::VectorXd d0 = A.diagonal();
        bool accepted = false;
        for (int trial = 0; trial < 40 && evals < max_evals; ++trial) {
            A.diagonal() = d0 + lambda * (d0.array() + 1e-14).matrix();
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
            const Eigen::VectorXd step = ldlt.solve(-g);
            A.diagonal() = d0;
            AngleConfig trial_cfg = cfg;
            for (std::size_t j = 0; j < n_points; ++j) {
                trial_cfg.theta[j] =
                    std::clamp(cfg.theta[j] + step[static_cast<Eigen::Index>(j)],
                               1e-7, M_PI - 1e-7);
                trial_cfg.phi[j] =
                    cfg.phi[j] + step[static_cast<Eigen::Index>(n_points + j)];
            }
            Eigen::VectorXd r_trial(R);
            design_residuals(basis, trial_cfg, t, r_trial, nullptr);
            ++evals;
            const double f_trial = 0.5 * r_trial.squaredNorm();
            if (f_trial < f) {
                cfg = std::move(trial_cfg);
                r = std::move(r_trial);
                f = f_trial;
                lambda = std::max(lambda * 0.33, 1e-14);
                accepted = true;
                break;
            }
            lambda *= 8.0;
        }
        if (!accepted) break;  // stationary for this start
        design_residuals(basis, cfg, t, r, &J);
        ++evals;
    }
    return r.cwiseAbs().maxCoeff();
}

}  // namespace

DesignSet generate_design(int t, std::size_t n_points, Rng& rng,
                          std::size_t max_iters) {
    if (t < 0 || t > kMaxHarmonicDegree) {
        throw std::invalid_argument("generate_design: invalid degree");
    }
    if (2 * n_points < static_cast<std::size_t>(t) * static_cast<std::size_t>(t)) {
        throw std::invalid_argument(
            "generate_design: n_points below the t^2/2 feasibility floor");
    }
    if (n_points < 2) {
        throw std::invalid_argument("generate_design: need at least 2 points");
    }

    AngleConfig best_cfg = spiral_init(n_points, rng, false);
    double best_residual = 0.0;
    if (t >= 1) {
        const HarmonicBasis basis(t);
        std::size_t evals = 0;
        best_residual = std::numeric_limits<double>::infinity();
        // multi-start: the defect landscape has shallow local minima, and a
        // restart is cheaper than escaping one
        for (int attempt = 0; attempt < 8 && evals < max_iters; ++attempt) {
            AngleConfig cfg = spiral_init(n_points, rng, attempt > 0);
            const double reached = lm_descend(basis, t, cfg, evals, max_iters);
            if (reached < best_residual) {
                best_residual = reached;
                best_cfg = std::move(cfg);
            }
            if (best_residual <= 1e-12) break;
        }
    }

    PointSet pts = angles_to_points(best_cfg);
    ValidationReport rep = validate_design(pts, t, kGeneratedDesignTol);
    if (!rep.pass) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "generate_design: did not converge (best max defect %.3e, "
                      "tolerance %.1e)",
                      std::max(best_residual, rep.residual), kGeneratedDesignTol);
        throw std::runtime_error(msg);
    }
    DesignSet d;
    d.points = std::move(pts);
    d.degree = t;
    d.source = DesignSource::generated;
    d.residual = rep.residual;
    d.validation_tol = kGeneratedDesignTol;
    return d;
}

PointSet scale_to_surface(const DesignSet& d, double r2) {
    if (!(r2 > 0.0)) throw std::invalid_argument("scale_to_surface: r2 must be > 0");
    PointSet out("proxy_points");
    out.points.reserve(d.points.size());
    for (const Point3& p : d.points.points) out.points.push_back(r2 * p);
    return out;
}

DesignLibrary::DesignLibrary(std::string dir) : dir_(std::move(dir)) {
    if (dir_.empty()) {
        if (const char* env = std::getenv("PSM_DESIGN_DIR")) {
            dir_ = env;
        } else {
            dir_ = PSM_BUNDLED_DESIGN_DIR;
        }
    }
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir_)) return;  // empty library; lookups will throw
    for (const auto& e : fs::directory_iterator(dir_)) {
        if (!e.is_regular_file() || e.path().extension() != ".txt") continue;
        int t = -1, n = -1;
        if (!parse_design_header(e.path().string(), t, n)) continue;
        entries_.push_back({e.path().string(), t, n});
    }
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
        return a.n < b.n || (a.n == b.n && a.path < b.path);
    });
}

DesignSet DesignLibrary::design_for_degree(int t) const {
    for (const Entry& e : entries_) {  // entries sorted by size
        if (e.t >= t) {
            return load_design(e.path, t);
        }
    }
    throw std::runtime_error("design library '" + dir_ +
                             "' has no design of degree >= " + std::to_string(t));
}

}  // namespace psm

#include "psm/lowrank.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace psm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;

// Householder QR with greedy column pivoting, early stop, and swap-based
// refinement. Column norms are downdated with periodic exact recomputation;
// the pristine matrix is kept so a swap can refactor from scratch, which
// keeps the swap logic free of delicate rank-one updates.
class PivotedQr {
public:
    explicit PivotedQr(MatrixXd m) : m0_(std::move(m)), w_(m0_) {
        perm_.resize(m0_.cols());
        std::iota(perm_.begin(), perm_.end(), 0);
    }

    Eigen::Index rows() const { return m0_.rows(); }
    Eigen::Index cols() const { return m0_.cols(); }
    int k() const { return k_; }
    const std::vector<int>& perm() const { return perm_; }
    const MatrixXd& factor() const { return w_; }
    int swaps() const { return swaps_; }

    // factor until every trailing column norm is <= tol (or full rank)
    void factor_to_tol(double tol) {
        init_norms();
        const Eigen::Index kmax = std::min(rows(), cols());
        while (k_ < kmax) {
            const Eigen::Index p = pivot_candidate();
            if (std::sqrt(std::max(norms2_[p], 0.0)) <= tol &&
                confirmed_below(tol)) {
                return;
            }
            swap_columns(k_, pivot_candidate());  // norms may have been refreshed
            householder_step();
        }
    }

    void factor_steps(int k) {
        init_norms();
        const Eigen::Index kmax = std::min(rows(), cols());
        if (k < 0 || k > kmax) throw std::invalid_argument("srrqr: k out of range");
        while (k_ < k) {
            swap_columns(k_, pivot_candidate());
            householder_step();
        }
    }

    // one more pivoted step (used when the explicit residual check asks for
    // a larger rank after a refactor)
    void extend_one() {
        if (k_ >= std::min(rows(), cols())) return;
        refresh_trailing_norms();
        swap_columns(k_, pivot_candidate());
        householder_step();
    }

    // pairwise swaps while some (i,j) exchange grows |det R11| by > f;
    // the growth factor is rho = sqrt(T_ij^2 + (omega_i * gamma_j)^2)
    void refine_swaps(double f) {
        if (k_ == 0 || k_ == cols()) return;
        const double gate = f * (1.0 + 1e-10);
        const int max_swaps = 3 * k_ + 64;
        while (true) {
            const auto r11 = w_.topLeftCorner(k_, k_);
            double dmin = std::numeric_limits<double>::infinity();
            for (int i = 0; i < k_; ++i) dmin = std::min(dmin, std::abs(r11(i, i)));
            if (dmin == 0.0) return;  // exactly singular leading block

            const MatrixXd t = r11.triangularView<Eigen::Upper>().solve(
                w_.block(0, k_, k_, cols() - k_));
            MatrixXd rinv = MatrixXd::Identity(k_, k_);
            r11.triangularView<Eigen::Upper>().solveInPlace(rinv);
            const VectorXd omega = rinv.rowwise().norm();
            VectorXd gamma = VectorXd::Zero(cols() - k_);
            if (k_ < rows()) {
                gamma = w_.block(k_, k_, rows() - k_, cols() - k_)
                            .colwise()
                            .norm()
                            .transpose();
            }
            double best = 0.0;
            int bi = -1, bj = -1;
            for (Eigen::Index j = 0; j < t.cols(); ++j) {
                for (int i = 0; i < k_; ++i) {
                    const double og = omega[i] * gamma[j];
                    const double rho = std::sqrt(t(i, j) * t(i, j) + og * og);
                    if (rho > best) {
                        best = rho;
                        bi = i;
                        bj = static_cast<int>(j);
                    }
                }
            }
            if (best <= gate) return;
            if (swaps_ >= max_swaps) {
                throw std::runtime_error("srrqr: swap refinement did not settle");
            }
            std::swap(perm_[bi], perm_[k_ + bj]);
            ++swaps_;
            refactor_current_perm();
        }
    }

    // R11^{-1} R12 for the current factorization
    MatrixXd interpolation() const {
        return w_.topLeftCorner(k_, k_).triangularView<Eigen::Upper>().solve(
            w_.block(0, k_, k_, cols() - k_));
    }

    std::vector<double> trailing_norms() const {
        std::vector<double> out(static_cast<std::size_t>(cols() - k_), 0.0);
        if (k_ < rows()) {
            for (Eigen::Index j = k_; j < cols(); ++j) {
                out[j - k_] = w_.col(j).segment(k_, rows() - k_).norm();
            }
        }
        return out;
    }

private:
    void init_norms() {
        norms2_.resize(cols());
        ref2_.resize(cols());
        for (Eigen::Index j = 0; j < cols(); ++j) {
            norms2_[j] = w_.col(j).squaredNorm();
            ref2_[j] = norms2_[j];
        }
    }

    Eigen::Index pivot_candidate() const {
        Eigen::Index p = k_;
        double best = -1.0;
        for (Eigen::Index j = k_; j < cols(); ++j) {
            if (norms2_[j] > best) {
                best = norms2_[j];
                p = j;
            }
        }
        return p;
    }

    // downdated estimates can drift; confirm a stop decision on exact norms
    bool confirmed_below(double tol) {
        refresh_trailing_norms();
        const Eigen::Index p = pivot_candidate();
        return std::sqrt(std::max(norms2_[p], 0.0)) <= tol;
    }

    void refresh_trailing_norms() {
        for (Eigen::Index j = k_; j < cols(); ++j) {
            norms2_[j] = (k_ < rows())
                             ? w_.col(j).segment(k_, rows() - k_).squaredNorm()
                             : 0.0;
            ref2_[j] = norms2_[j];
        }
    }

    void swap_columns(Eigen::Index a, Eigen::Index b) {
        if (a == b) return;
        w_.col(a).swap(w_.col(b));
        std::swap(perm_[a], perm_[b]);
        std::swap(norms2_[a], norms2_[b]);
        std::swap(ref2_[a], ref2_[b]);
    }

    void householder_step() {
        const Eigen::Index s = k_;
        const Eigen::Index mrem = rows() - s;
        VectorXd u = w_.col(s).segment(s, mrem);
        const double normx = u.norm();
        double beta = 0.0;
        if (normx > 0.0) {
            beta = (u[0] > 0.0) ? -normx : normx;
            u[0] -= beta;
            const double unorm2 = u.squaredNorm();
            if (unorm2 > 0.0 && cols() > s + 1) {
                const double tau = 2.0 / unorm2;
                auto tail = w_.block(s, s + 1, mrem, cols() - s - 1);
                const Eigen::RowVectorXd wrow = u.transpose() * tail;
                tail.noalias() -= (tau * u) * wrow;
            }
        }
        w_.col(s).segment(s, mrem).setZero();
        w_(s, s) = beta;
        ++k_;
        for (Eigen::Index j = k_; j < cols(); ++j) {
            norms2_[j] -= w_(s, j) * w_(s, j);
            if (norms2_[j] <= 1e-12 * ref2_[j] || norms2_[j] < 0.0) {
                norms2_[j] = (k_ < rows())
                                 ? w_.col(j).segment(k_, rows() - k_).squaredNorm()
                                 : 0.0;
                ref2_[j] = norms2_[j];
            }
        }
    }

    // unpivoted re-factorization of the first k_ columns in perm order
    void refactor_current_perm() {
        const int k_target = k_;
        for (Eigen::Index j = 0; j < cols(); ++j) {
            w_.col(j) = m0_.col(perm_[j]);
        }
        k_ = 0;
        init_norms();
        while (k_ < k_target) householder_step();
    }

    MatrixXd m0_;
    MatrixXd w_;
    std::vector<int> perm_;
    int k_ = 0;
    int swaps_ = 0;
    VectorXd norms2_;
    VectorXd ref2_;
};

MatrixXd to_eigen(const DenseMatrix& a) {
    return RowMajorMap(a.data(), static_cast<Eigen::Index>(a.rows()),
                       static_cast<Eigen::Index>(a.cols()));
}

DenseMatrix from_eigen(const MatrixXd& m) {
    DenseMatrix out(static_cast<std::size_t>(m.rows()),
                    static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
        }
    }
    return out;
}

}  // namespace

SrrqrFactors srrqr(const DenseMatrix& a, int k, double f) {
    if (k < 1 || static_cast<std::size_t>(k) > std::min(a.rows(), a.cols())) {
        throw std::invalid_argument("srrqr: k out of range");
    }
    if (!(f >= 1.0)) throw std::invalid_argument("srrqr: f must be >= 1");
    PivotedQr qr(to_eigen(a));
    qr.factor_steps(k);
    qr.refine_swaps(f);

    SrrqrFactors out;
    out.perm = qr.perm();
    out.k = qr.k();
    out.r = from_eigen(qr.factor().topRows(qr.k()));
    out.t = from_eigen(qr.interpolation());
    out.trailing_norms = qr.trailing_norms();
    out.swaps = qr.swaps();
    return out;
}

IDFactors id_rows(const DenseMatrix& a, double tol, double f) {
    if (!(tol > 0.0)) throw std::invalid_argument("id_rows: tol must be > 0");
    if (!(f >= 1.0)) throw std::invalid_argument("id_rows: f must be >= 1");
    const std::size_t n = a.rows(), m = a.cols();
    const MatrixXd am = to_eigen(a);

    PivotedQr qr(am.transpose());
    qr.factor_to_tol(tol);

    IDFactors id;
    id.entry_bound = f;
    const Eigen::Index kmax = std::min<Eigen::Index>(n, m);
    while (true) {
        qr.refine_swaps(f);
        const int k = qr.k();
        const auto& perm = qr.perm();

        MatrixXd u = MatrixXd::Zero(n, k);
        const MatrixXd t = qr.interpolation();
        for (int i = 0; i < k; ++i) u(perm[i], i) = 1.0;
        for (Eigen::Index j = 0; j < t.cols(); ++j) {
            u.row(perm[k + j]) = t.col(j).transpose();
        }

        // exact residuals, not the factorization's estimates
        MatrixXd aj(k, m);
        for (int i = 0; i < k; ++i) aj.row(i) = am.row(perm[i]);
        MatrixXd e = am;
        e.noalias() -= u * aj;
        const VectorXd res = e.rowwise().norm();

        if (res.maxCoeff() <= tol || k == kmax) {
            id.skeleton.assign(perm.begin(), perm.begin() + k);
            id.projection = from_eigen(u);
            id.row_residuals.assign(res.data(), res.data() + res.size());
            return id;
        }
        qr.extend_one();
    }
}

}  // namespace psm

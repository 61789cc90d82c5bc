#pragma once

#include <vector>

#include "psm/dense_matrix.hpp"

namespace psm {

// Row interpolative decomposition A ~= U * A(J,:) with
//   - U(J,:) the k x k identity (skeleton rows reproduced exactly),
//   - |U| entrywise bounded by entry_bound,
//   - row_residuals[i] = ||row i of A - U A_J||_2, computed explicitly.
struct IDFactors {
    std::vector<int> skeleton;
    DenseMatrix projection;             // n x k
    double entry_bound = 1.0;
    std::vector<double> row_residuals;  // n

    std::size_t rank() const { return skeleton.size(); }
};

// Column strong rank-revealing QR: A Pi = Q [R11 R12; 0 R22] with every entry
// of R11^{-1} R12 bounded by f in magnitude. Q is never formed.
struct SrrqrFactors {
    std::vector<int> perm;       // column order; first k are the selected columns
    int k = 0;
    DenseMatrix r;               // k x n, columns in perm order, R11 upper triangular
    DenseMatrix t;               // k x (n-k), R11^{-1} R12
    std::vector<double> trailing_norms;  // n-k column norms of R22
    int swaps = 0;
};

// Pivoted Householder QR to a fixed rank k, then pairwise column swaps while
// any swap grows |det R11| by more than f (within a small no-cycling slack).
SrrqrFactors srrqr(const DenseMatrix& a, int k, double f);

// Row ID at tolerance tol: smallest rank k for which every row residual
// 2-norm is <= tol, entries of U bounded by f. Runs the pivoted QR on the
// transpose with early stop, then the swap refinement at the chosen k.
IDFactors id_rows(const DenseMatrix& a, double tol, double f);

}  // namespace psm

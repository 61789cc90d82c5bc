#include "psm/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "psm/parallel.hpp"

namespace psm {

double laplace_kernel(const Point3& x, const Point3& y) {
    const double d2 = (x - y).norm2();
    if (d2 == 0.0) {
        throw std::domain_error("laplace_kernel: coincident source and target");
    }
    return 1.0 / std::sqrt(d2);
}

DenseMatrix kernel_matrix(const PointSet& X, const PointSet& Y, int threads) {
    const std::size_t n = X.size(), m = Y.size();
    DenseMatrix K(n, m);
    std::vector<std::string> errors(std::max(threads, 1));
    parallel_for(n, threads, [&](std::size_t i, int tid) {
        double* row = K.data() + i * m;
        for (std::size_t j = 0; j < m; ++j) {
            const double d2 = (X[i] - Y[j]).norm2();
            if (d2 == 0.0) {
                if (errors[tid].empty()) {
                    errors[tid] = "kernel_matrix: coincident pair at (" +
                                  std::to_string(i) + "," + std::to_string(j) + ")";
                }
                return;
            }
            row[j] = 1.0 / std::sqrt(d2);
        }
    });
    for (const auto& e : errors) {
        if (!e.empty()) throw std::domain_error(e);
    }
    return K;
}

}  // namespace psm

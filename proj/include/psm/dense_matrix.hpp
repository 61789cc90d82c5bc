#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace psm {

// Row-major dense matrix. Sized for the problem class at hand (up to a few
// thousand by a few tens of thousands); no sparse or out-of-core storage.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t n_rows, std::size_t n_cols)
        : rows_(n_rows), cols_(n_cols), data_(n_rows * n_cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool all_finite() const;
    double max_abs() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace psm

#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace spin {

// Row-major dense matrix of doubles. The one tensor type used everywhere.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) {
        assert(i < rows && j < cols);
        return data[i * cols + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        assert(i < rows && j < cols);
        return data[i * cols + j];
    }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    bool same_shape(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

// C = A * B
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

// C = A^T * B
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);

// C = A * B^T
DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b);

void add_inplace(DenseMatrix& a, const DenseMatrix& b);
void scale_inplace(DenseMatrix& a, double c);
void axpy_inplace(DenseMatrix& a, double c, const DenseMatrix& b); // a += c*b

double max_abs(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
double frobenius_norm(const DenseMatrix& a);

bool all_finite(const DenseMatrix& a);

} // namespace spin

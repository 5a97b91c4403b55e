#include "spin/dense.hpp"

#include <algorithm>
#include <cmath>

namespace spin {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    assert(a.cols == b.rows);
    DenseMatrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            double v = ai[k];
            if (v == 0.0) continue;
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < b.cols; ++j) ci[j] += v * bk[j];
        }
    }
    return c;
}

DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
    assert(a.rows == b.rows);
    DenseMatrix c(a.cols, b.cols);
    for (std::size_t k = 0; k < a.rows; ++k) {
        const double* ak = a.row(k);
        const double* bk = b.row(k);
        for (std::size_t i = 0; i < a.cols; ++i) {
            double v = ak[i];
            if (v == 0.0) continue;
            double* ci = c.row(i);
            for (std::size_t j = 0; j < b.cols; ++j) ci[j] += v * bk[j];
        }
    }
    return c;
}

DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b) {
    assert(a.cols == b.cols);
    DenseMatrix c(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* bj = b.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) s += ai[k] * bj[k];
            ci[j] = s;
        }
    }
    return c;
}

void add_inplace(DenseMatrix& a, const DenseMatrix& b) {
    assert(a.same_shape(b));
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

void scale_inplace(DenseMatrix& a, double c) {
    for (double& v : a.data) v *= c;
}

void axpy_inplace(DenseMatrix& a, double c, const DenseMatrix& b) {
    assert(a.same_shape(b));
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += c * b.data[i];
}

double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (double v : a.data) m = std::max(m, std::fabs(v));
    return m;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    assert(a.same_shape(b));
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        m = std::max(m, std::fabs(a.data[i] - b.data[i]));
    return m;
}

double frobenius_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.data) s += v * v;
    return std::sqrt(s);
}

bool all_finite(const DenseMatrix& a) {
    for (double v : a.data)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace spin

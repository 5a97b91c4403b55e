#include "spin/csr.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <tuple>

namespace spin {

bool CsrMatrix::valid() const {
    if (row_ptr.size() != n_rows + 1) return false;
    if (row_ptr.front() != 0 || row_ptr.back() != col_idx.size()) return false;
    if (col_idx.size() != values.size()) return false;
    for (std::size_t i = 0; i < n_rows; ++i) {
        if (row_ptr[i] > row_ptr[i + 1]) return false;
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            if (col_idx[p] >= n_cols) return false;
            if (p > row_ptr[i] && col_idx[p - 1] >= col_idx[p]) return false;
        }
    }
    return true;
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
    assert(i < n_rows && j < n_cols);
    auto begin = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    auto end = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    auto it = std::lower_bound(begin, end, static_cast<std::uint32_t>(j));
    if (it == end || *it != j) return 0.0;
    return values[static_cast<std::size_t>(it - col_idx.begin())];
}

bool CsrMatrix::symmetric(double tol) const {
    if (n_rows != n_cols) return false;
    for (std::size_t i = 0; i < n_rows; ++i)
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            double mirror = at(col_idx[p], i);
            if (std::fabs(mirror - values[p]) > tol) return false;
        }
    return true;
}

CsrMatrix csr_from_triplets(std::size_t n_rows, std::size_t n_cols,
                            std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> t) {
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) <
               std::tie(std::get<0>(b), std::get<1>(b));
    });
    CsrMatrix m;
    m.n_rows = n_rows;
    m.n_cols = n_cols;
    m.row_ptr.assign(n_rows + 1, 0);
    for (std::size_t k = 0; k < t.size();) {
        auto [r, c, v] = t[k];
        double sum = v;
        std::size_t j = k + 1;
        while (j < t.size() && std::get<0>(t[j]) == r && std::get<1>(t[j]) == c)
            sum += std::get<2>(t[j++]);
        m.col_idx.push_back(c);
        m.values.push_back(sum);
        ++m.row_ptr[r + 1];
        k = j;
    }
    for (std::size_t i = 0; i < n_rows; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
    return m;
}

void spmm_into(const CsrMatrix& m, const DenseMatrix& x, DenseMatrix& out) {
    assert(m.n_cols == x.rows);
    if (out.rows != m.n_rows || out.cols != x.cols) out = DenseMatrix(m.n_rows, x.cols);
    else out.fill(0.0);
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        double* oi = out.row(i);
        for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
            double v = m.values[p];
            const double* xr = x.row(m.col_idx[p]);
            for (std::size_t j = 0; j < x.cols; ++j) oi[j] += v * xr[j];
        }
    }
}

DenseMatrix spmm(const CsrMatrix& m, const DenseMatrix& x) {
    DenseMatrix out(m.n_rows, x.cols);
    spmm_into(m, x, out);
    return out;
}

} // namespace spin
